from .run_context import RunContext, to_jsonable

__all__ = ['RunContext', 'to_jsonable']
