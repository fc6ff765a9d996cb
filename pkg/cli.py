"""emiscan

Module containing the command-line front end: scan a scenario file into image files, fit a
sweep csv, or run the self checks.

Every failure ends the process with exit code 2 and a single JSON line on stderr naming the
error class, so scripts can tell parse, grid and physics failures apart.
"""
from __future__ import annotations

from typing import Optional, Sequence
import argparse
import json
import logging
import os
import sys

from emi_errors import EmiError, GridMismatch
from fitting import fit_resonance, load_sweep, r_phi
from image_io import load_image, save_image
from imaging import normalize, run_scan, smooth, timing_report
from scenario import load_scenario, seed_override
from self_checks import run_checks

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED_CHECKS, EXIT_ERROR = 0, 1, 2


def configure_logging(quiet: bool = False) -> None:
    """Configures the root logger for a command-line run."""
    logging.basicConfig(
        level=logging.WARNING if quiet else logging.INFO,
        format='%(asctime)s [%(levelname)s] %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )


def build_parser() -> argparse.ArgumentParser:
    """Returns the argument parser of the emiscan command."""
    parser = argparse.ArgumentParser(
        prog='emiscan',
        description='Simulate electromagnetic induction imaging with a raster-scanned RF '
                    'atomic magnetometer.')
    parser.add_argument('--quiet', action='store_true', help='log warnings and errors only')
    parser.add_argument('--threads', type=int, default=None,
                        help='worker threads for scanning (default: all cores)')
    commands = parser.add_subparsers(dest='command', required=True)

    scan = commands.add_parser('scan', help='scan a scenario into image files')
    scan.add_argument('scenario', help='scenario JSON file')
    scan.add_argument('out_dir', help='directory for the image files')
    scan.add_argument('--mode', choices=('full', 'fast'), default=None,
                      help='override the scenario acquisition mode')
    scan.add_argument('--seed', type=int, default=None,
                      help='override the master seed (EMISCAN_SEED takes precedence)')
    scan.add_argument('--background', default=None,
                      help='sidecar JSON of a background image, for normalisation and fast mode')
    scan.add_argument('--smooth', type=int, default=None, metavar='RADIUS',
                      help='smooth the normalised image with a Gaussian of this radius')

    fit = commands.add_parser('fit', help='fit a sweep csv and print the result as JSON')
    fit.add_argument('sweep_csv', help='csv file with an omega_rad_s,x_v,y_v header')
    fit.add_argument('--separate', action='store_true',
                     help='fit the two quadratures independently')
    fit.add_argument('--convention', choices=('swapped', 'standard'), default='swapped',
                     help='phase convention: atan2(X, Y) or atan2(Y, X)')

    verify = commands.add_parser('verify', help='run the built-in self checks')
    verify.add_argument('--json', action='store_true', help='print a JSON report')
    return parser


def cmd_scan(args: argparse.Namespace) -> int:
    """Scans the scenario and writes the target image, the normalised image when a
    background is given, and the timing report."""
    scenario_file = load_scenario(args.scenario)
    seed = seed_override(args.seed)
    if seed is not None:
        scenario_file = scenario_file.with_seed(seed)
    if args.mode is not None:
        scenario_file = scenario_file.with_mode(args.mode)

    background = load_image(args.background) if args.background else None
    scenario = scenario_file.to_scenario(background)
    if background is not None and background.grid != scenario.grid:
        raise GridMismatch('background image grid differs from the scenario grid')

    image = run_scan(scenario, args.threads, scenario_file.hash())
    written = [save_image(image, args.out_dir, 'target')]
    if background is not None:
        normalized = normalize(background, image)
        if args.smooth is not None:
            normalized = smooth(normalized, args.smooth)
        written.append(save_image(normalized, args.out_dir, 'normalized'))

    report = timing_report(image).to_dict()
    report.update({'scenario_hash': scenario_file.hash(), 'seed': image.seed,
                   'mode': image.mode})
    timing_path = os.path.join(args.out_dir, 'timing.json')
    with open(timing_path, 'w', encoding='utf-8', newline='\n') as json_file:
        json.dump({key: value if value != float('inf') else None
                   for key, value in report.items()}, json_file, indent=2, sort_keys=True)
        json_file.write('\n')
    written.append(timing_path)

    for path in written:
        print(path)
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    """Fits the sweep file and prints the result as JSON."""
    record = load_sweep(args.sweep_csv)
    result = fit_resonance(record, separate=args.separate)
    report = result.to_dict()
    if args.convention != 'swapped' and result.params.amplitude > 0:
        report['phi_peak_rad'] = r_phi(result.params, result.params.omega0, args.convention)[1]
    report['convention'] = args.convention
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Runs the self checks and prints a pass/fail report."""
    results = run_checks()
    passed = all(result.passed for result in results)
    if args.json:
        print(json.dumps({'passed': passed, 'checks': [r.to_dict() for r in results]},
                         indent=2))
    else:
        for result in results:
            status = 'PASS' if result.passed else 'FAIL'
            print(f'{status} {result.name}: {result.value:.6g} ({result.expected})')
    return EXIT_OK if passed else EXIT_FAILED_CHECKS


COMMANDS = {'scan': cmd_scan, 'fit': cmd_fit, 'verify': cmd_verify}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Runs the command named in argv and returns the exit code.

    Args:
        - argv: The arguments after the program name; defaults to sys.argv[1:].
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.quiet)
    try:
        return COMMANDS[args.command](args)
    except (EmiError, OSError, ValueError) as error:
        logger.debug('command %s failed', args.command, exc_info=True)
        print(json.dumps({'error': type(error).__name__, 'message': str(error)}),
              file=sys.stderr)
        return EXIT_ERROR


if __name__ == '__main__':
    import python_ta
    python_ta.check_all(config={
        'extra-imports': ['argparse', 'json', 'logging', 'os', 'sys', 'emi_errors', 'fitting',
                          'image_io', 'imaging', 'scenario', 'self_checks'],
        'allowed-io': ['cmd_scan', 'cmd_fit', 'cmd_verify', 'main'],
        'max-line-length': 100,
        'disable': ['E1136']
    })

    import python_ta.contracts
    python_ta.contracts.DEBUG_CONTRACTS = False
    python_ta.contracts.check_all_contracts()

    import doctest
    doctest.testmod()
