import traceback

UNITS = ('decimal', 'percent', 'bp')

# decimal return units per display unit
UNIT_SCALE = {
    'decimal': 1.0,
    'percent': 1e2,
    'bp': 1e4,
    }

def format_exc(exc):
    return traceback.format_exception_only(exc.__class__, exc)[0].strip()

def elide(s, width=100):
    return s if len(s) <= width else s[:width-3] + '...'

def scale(value, unit='decimal', power=1):
    """Converts a decimal return (or a squared return when *power* is 2) to
    *unit*."""
    try:
        factor = UNIT_SCALE[unit]
    except KeyError:
        raise ValueError('unknown unit: {!r}'.format(unit))
    return value * factor ** power

def format_value(value, unit='decimal', power=1, precision=None):
    """Formats a return-like value for display in *unit*."""
    if value is None:
        return 'na'
    v = scale(value, unit, power)
    if unit == 'decimal':
        return '{:.{}f}'.format(v, 6 if precision is None else precision)
    elif unit == 'percent':
        return '{:.{}f}%'.format(v, 4 if precision is None else precision)
    return '{:.{}f}bp'.format(v, 2 if precision is None else precision)

def round_bp(value, step=10):
    """Rounds a decimal return to the nearest *step* basis points."""
    bp = value * UNIT_SCALE['bp']
    return step * round(bp / step)

def format_pair(left, right, precision=2):
    """Formats a left/right percentage pair, e.g. '13.66 - 86.34%'."""
    return '{:.{p}f} - {:.{p}f}%'.format(left, right, p=precision)
