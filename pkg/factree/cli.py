import sys
import argparse
import datetime
from dataclasses import dataclass, field

from . import logs
from . import utils
from . import errors
from . import commands
from . import formatter
from .ingest import DATE_FORMAT
from .utils.format import UNITS
from .utils.function import Param

log = logs.get(__name__)

PROG = 'factree'

FORMATS = ('text', 'json', 'csv', 'dot')

# flags shared by every subcommand; hidden command params of the same name
# are filled from these
GLOBAL_NAMES = ('verbose', 'format', 'unit', 'out', 'seed')

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2

@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    format: str = 'text'
    unit: str = 'decimal'
    out: str = None
    seed: int = 0
    verbose: int = 0

    def __post_init__(self):
        if self.format not in FORMATS:
            raise errors.UsageError('unknown format: {!r}'.format(self.format))
        if self.unit not in UNITS:
            raise errors.UsageError('unknown unit: {!r}'.format(self.unit))
        start, end = self.params.get('start'), self.params.get('end')
        if start is not None and end is not None and start > end:
            raise errors.UsageError('--start {} is after --end {}'.format(start, end))

    @property
    def func(self):
        return COMMANDS[self.command]

    def call(self):
        return self.func(**self.params)

COMMANDS = {utils.function.command_name(f): f for f in commands.COMMANDS}

class ArgumentParser(argparse.ArgumentParser):
    """Raises `UsageError` instead of printing usage and exiting."""
    def error(self, message):
        raise errors.UsageError(message)

class Parser(object):
    def __init__(self):
        # global args, repeated on every subparser
        self.base_parser = ArgumentParser(add_help=False)
        self.add_global_args(self.base_parser)

        self.parser = ArgumentParser(prog=PROG,
            description='Regression trees and three-factor baselines for daily returns.')
        self.parser.add_argument('--version', action='version',
            version='%(prog)s {}'.format(_version()))

        subs = self.parser.add_subparsers(title='commands', dest='command')
        subs.required = True
        for name in sorted(COMMANDS):
            cmd = utils.function.func_to_dict(COMMANDS[name])
            desc = self.get_help(cmd['doc'])
            sub = subs.add_parser(name, help=desc, description=cmd['doc'],
                parents=[self.base_parser])
            self.add_command_args(sub, cmd)
            sub.set_defaults(cmd_meta=cmd)

    def parse(self, argv=None):
        """Returns a `RunConfig` for *argv*."""
        args = self.parser.parse_args(argv)
        return RunConfig(args.command, self.get_command_args(args),
            format=args.format, unit=args.unit, out=args.out, seed=args.seed,
            verbose=args.verbose)

    ## get arguments ##

    def get_command_args(self, args):
        """Returns the keyword arguments to pass to the selected command."""
        kwargs = {}
        for param in args.cmd_meta['params']:
            name = param['name']
            if param.get('hide', False) and name not in GLOBAL_NAMES:
                continue
            kwargs[name] = getattr(args, name)
        return kwargs

    ## add arguments ##

    def add_command_args(self, parser, cmd):
        for param in cmd['params']:
            if param.get('hide', False):
                continue
            self.add_option_arg(parser, param)

    def add_option_arg(self, parser, param):
        name = param['name']
        hint = param.get('hint')
        doc = param.get('doc')
        required = 'default' not in param
        default = param.get('default')

        # use dashes instead of underscores for param names
        flag = '--' + name.replace('_', '-')

        if hint == 'bool':
            # handle bool special case
            group = parser.add_mutually_exclusive_group()
            default = bool(default)
            help = self.get_argument_help(doc)

            # add a flag for the True value
            group.add_argument(flag, action='store_true', default=default,
                dest=name, help=help + (' (default)' if default else ''))

            # add a flag for the False value
            group.add_argument('--no-' + flag[2:], action='store_false',
                dest=name, help=argparse.SUPPRESS)

        elif hint == 'paths':
            parser.add_argument(flag, dest=name, nargs='+', metavar='PATH',
                required=required, default=default,
                help=self.get_argument_help(doc))

        else:
            kwargs = {}
            if 'choices' in param:
                kwargs['choices'] = param['choices']
            parser.add_argument(flag, dest=name, type=self.get_converter(hint),
                metavar=self.get_argument_hint(hint), required=required,
                default=default, help=self.get_argument_help(doc, default), **kwargs)

    def add_global_args(self, parser):
        """Adds an argument group to *parser* for global arguments."""
        group = parser.add_argument_group('output arguments')

        group.add_argument('-v', '--verbose', action='count',
            default=0, help='enable verbose output (-vv for more)')
        group.add_argument('--format', choices=FORMATS, default='text',
            help='output format (default: text)')
        group.add_argument('--unit', choices=UNITS, default='decimal',
            help='display unit for returns (default: decimal)')
        group.add_argument('--out', metavar='PATH',
            help='write the result here instead of stdout')
        group.add_argument('--seed', type=int, default=0,
            help='seed for synthetic data (default: 0)')

    ## parser help ##

    def get_help(self, doc):
        doc = doc or '\n'
        return doc.splitlines()[0]

    def get_argument_help(self, doc=None, default=None):
        help = doc or ''
        if default not in [Param.empty, argparse.SUPPRESS, None, False]:
            help += ' (default: {})'.format(default)
        return help

    def get_argument_hint(self, hint):
        if not hint or hint == 'str':
            return 'VALUE'
        return hint.upper()

    ## parser utils ##

    def get_converter(self, hint):
        """Returns a type converter keyed to a specific typehint."""
        if hint == 'int':
            conv = lambda v: int(v)
        elif hint == 'float':
            conv = lambda v: float(v)
        elif hint == 'date':
            conv = lambda v: datetime.datetime.strptime(v, DATE_FORMAT).date()
        else:
            conv = lambda v: v

        # the converter name is used in error messages
        conv.__name__ = hint or 'str'
        return conv

def _version():
    from . import __version__
    return __version__

def emit(data, out=None, stdout=None):
    """Writes *data* (bytes) to *out* atomically, or to *stdout*."""
    if out:
        utils.path.write_bytes(out, data)
        log.info('written: %s', out)
        return
    stdout = stdout or sys.stdout
    stdout = getattr(stdout, 'buffer', stdout)
    stdout.write(data)
    stdout.flush()

def run(argv=None, stdout=None, stderr=None):
    """Parses *argv*, runs the selected command and writes its formatted
    result. Returns the exit status: 0 on success, 2 for usage errors and 1
    for any other error, which is reported on a single line."""
    stderr = stderr or sys.stderr

    def fail(status, e):
        print('{}: error: {}'.format(PROG, e), file=stderr)
        return status

    try:
        config = Parser().parse(argv)
    except errors.UsageError as e:
        return fail(EXIT_USAGE, e)
    except SystemExit as e:
        # --help and --version
        return e.code or EXIT_OK

    logs.init(config.verbose, log_exceptions=False)

    try:
        result = config.call()
        # format completely before writing anything
        data = formatter.get(config.format, unit=config.unit).encode(result)
        emit(data, config.out, stdout)
    except errors.UsageError as e:
        if config.verbose:
            log.exception('usage error')
        return fail(EXIT_USAGE, e)
    except (errors.FactreeError, OSError) as e:
        if config.verbose:
            log.exception('%s failed', config.command)
        return fail(EXIT_ERROR, e)

    return EXIT_OK
