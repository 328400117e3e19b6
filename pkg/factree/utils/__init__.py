# imports for convenience
from . import path
from . import retry
from . import format
from . import function
