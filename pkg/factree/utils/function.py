import copy
from inspect import signature, Parameter as Param

from .. import errors

def command(name=None):
    """Decorator that identifies a function to expose as a CLI subcommand.

    *name* overrides the subcommand name, which is otherwise the function
    name. To provide parameter metadata, use the `@param()` decorator.
    """
    def decorator(func):
        cmd_meta = func.__dict__.setdefault('_meta', {})
        cmd_meta.setdefault('params', {})
        if name:
            cmd_meta['name'] = name
        return func
    return decorator

def command_name(func):
    return getattr(func, '_meta', {}).get('name') or func.__name__

def param(name, hint=None, doc=None, hide=False, **metadata):
    """Decorator that assigns additional metadata, such as a doc string or
    `choices`, to individual command parameters.

    The default *hint* is `str`.

    *hide* prevents a parameter from being exposed on the command line.
    """
    def decorator(func):
        cmd_meta = func.__dict__.setdefault('_meta', {})
        params = cmd_meta.setdefault('params', {})
        param = params.setdefault(name, {})

        if hint:
            param['hint'] = _hint_to_str(hint)

        if doc: param['doc'] = doc
        if hide: param['hide'] = hide
        param.update(metadata)
        return func
    return decorator

def _hint_to_str(hint):
    """Internal. Converts type hints to strings."""
    if not hint:
        return 'str'
    elif isinstance(hint, str):
        return hint
    return hint.__name__

def func_to_dict(func):
    """Returns the subcommand name, doc and parameter metadata of *func*."""
    d = {
        'name': command_name(func),
        'doc': func.__doc__,
        }

    # we mutate these dicts, so make copies
    cmd_meta = copy.deepcopy(getattr(func, '_meta', {}))
    cmd_meta.pop('name', None)
    cmd_params = cmd_meta.pop('params', {})

    params = d['params'] = []
    for p in signature(func).parameters.values():
        if p.kind in (Param.VAR_POSITIONAL, Param.VAR_KEYWORD):
            raise errors.UsageError(
                'commands cannot take *args or **kwargs: {}'.format(func.__name__))

        param = {
            'name': p.name,
            'kind': int(p.kind),
            }

        meta = cmd_params.pop(p.name, {})
        if p.default is not p.empty:
            param['default'] = p.default
            # if no hint, set an automatic hint based on the default value
            if 'hint' not in meta and p.default is not None:
                param['hint'] = type(p.default).__name__

        param.update(meta)
        params.append(param)

    if cmd_params:
        raise errors.UsageError('metadata for unknown parameters of {}: {}'.format(
            func.__name__, ', '.join(sorted(cmd_params))))

    if cmd_meta:
        # add any left over metadata
        d['meta'] = cmd_meta

    return d
