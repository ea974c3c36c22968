import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from model.enums import InputGenerator, OutputFormat
from model.global_constants import EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED
from model.validation.bench_config import BenchConfig
from src.bench.commands import cmd_sort, cmd_sweep, cmd_verify
from src.faults import StructuralFault
from src.utils import import_from_json

logger = logging.getLogger(__name__)

# flags that map one to one onto BenchConfig fields
CONFIG_FLAGS = ['input', 'gen', 'seed', 'c', 'B', 'M', 'seeds', 'b', 's', 'format', 'output', 'report']


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Instrumented SPMS sort on a simulated work-stealing machine.')
    subparsers = parser.add_subparsers(dest='command', required=True)
    for name, many in (('sort', False), ('sweep', True), ('verify', False)):
        sub = subparsers.add_parser(name)
        sub.add_argument('--config', help='JSON file with BenchConfig fields; flags override it')
        sub.add_argument('--n', type=int, nargs='+' if many else None)
        sub.add_argument('--p', type=int, nargs='+' if many else None)
        sub.add_argument('--input', help='.bin (little-endian u64) or .txt key file')
        sub.add_argument('--gen', choices=[generator.value for generator in InputGenerator])
        sub.add_argument('--seed', type=int, help='input generator seed')
        sub.add_argument('--seeds', type=int, nargs='+', help='scheduler seeds')
        sub.add_argument('--c', type=int)
        sub.add_argument('--B', type=int)
        sub.add_argument('--M', type=int)
        sub.add_argument('--b', type=int, help='miss cost in ticks')
        sub.add_argument('--s', type=int, help='steal cost in ticks')
        sub.add_argument('--format', choices=[output_format.value for output_format in OutputFormat])
        sub.add_argument('--output', help='sorted keys (sort) or sweep table (sweep)')
        sub.add_argument('--report', help='report file (sort)')
        sub.add_argument('--inject-fault', action='store_true',
                         help='row-major transposing redistribution, to exercise the sharing audit')
        sub.add_argument('--verbose', action='store_true')
        sub.add_argument('--profile', action='store_true')
    return parser


def build_config(args: argparse.Namespace) -> BenchConfig:
    """File values first, then every flag given on the command line."""
    data: Dict[str, Any] = import_from_json(args.config) if args.config else dict()
    for flag in CONFIG_FLAGS:
        value = getattr(args, flag)
        if value is not None:
            data[flag] = value
    if args.inject_fault:
        data['inject_fault'] = True
    if args.n is not None:
        data['n'] = args.n[0] if isinstance(args.n, list) else args.n
    if args.p is not None:
        data['p'] = args.p[0] if isinstance(args.p, list) else args.p
    return BenchConfig(**data)


def run_command(args: argparse.Namespace) -> int:
    config = build_config(args)
    if args.command == 'sort':
        return cmd_sort(config)
    if args.command == 'verify':
        return cmd_verify(config)
    cmd_sweep(config, args.n or [config.n], args.p or [config.p])
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main process."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        if not args.profile:
            return run_command(args)
        # Profile Mode
        import cProfile
        import pstats

        with cProfile.Profile() as pr:
            code = run_command(args)
        stats = pstats.Stats(pr)
        stats.sort_stats(pstats.SortKey.TIME)
        stats.print_stats(20)
        return code
    except ValidationError as error:
        print(f'invalid configuration:\n{error}', file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as error:
        print(f'usage error: {error}', file=sys.stderr)
        return EXIT_USAGE
    except StructuralFault as fault:
        logger.error('%s', fault)
        return EXIT_VERIFY_FAILED


if __name__ == '__main__':
    sys.exit(main())
