"""
Dirichlet Composition Lab - Command Line Application
Numerical experiments on composition operators of the Hardy space of Dirichlet series
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from dotenv import load_dotenv

import config
from backend import criteria, operator_lab, polytorus
from backend.counting import CountingLab, HeatmapGrid
from backend.dirichlet_algebra import monomial
from backend.errors import LabError, MalformedSpec
from backend.reporting import to_csv, to_json, write_artifact
from backend.symbols import Symbol, symbol_from_spec, symbol_to_spec, validate_class

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2

DEFAULT_GRID = '0.55,2.5,-3,3,40,40'

Result = Tuple[Dict[str, Any], Optional[pd.DataFrame], int]


def setup_logging(level: Optional[str] = None) -> None:
    """Route all logging to stderr so stdout carries only the artifact"""
    level = (level or os.getenv('LOG_LEVEL', config.LOG_LEVEL)).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=config.LOG_FORMAT,
                        stream=sys.stderr, force=True)


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value == '':
        return default
    try:
        return int(value)
    except ValueError:
        raise MalformedSpec(f"environment variable {name} must be an integer, got '{value}'")


def resolve_settings(args: argparse.Namespace) -> Dict[str, Any]:
    """Flags override the environment, which overrides config.py"""
    nbasis = args.nbasis if args.nbasis is not None else _env_int('LAB_NBASIS', config.N_BASIS_DEFAULT)
    ntrunc = args.ntrunc if args.ntrunc is not None else _env_int('LAB_NTRUNC', config.N_TRUNC_DEFAULT)
    if not 1 <= nbasis <= ntrunc <= config.N_CLI_MAX:
        raise MalformedSpec(f"need 1 <= nbasis <= ntrunc <= {config.N_CLI_MAX}, got {nbasis}, {ntrunc}")
    return {
        'seed': args.seed if args.seed is not None else _env_int('LAB_SEED', config.DEFAULT_SEED),
        'nbasis': nbasis,
        'ntrunc': ntrunc,
        'grid': args.grid or DEFAULT_GRID,
    }


def load_symbol(args: argparse.Namespace) -> Symbol:
    if args.symbol and args.inline:
        raise MalformedSpec("give either --symbol or --inline, not both")
    try:
        if args.symbol:
            with open(args.symbol, encoding='utf-8') as handle:
                spec = json.load(handle)
        else:
            spec = json.loads(args.inline)
    except OSError as e:
        raise MalformedSpec(f"cannot read symbol file: {e}") from e
    except json.JSONDecodeError as e:
        raise MalformedSpec(f"symbol JSON does not parse: {e}") from e
    return symbol_from_spec(spec)


def _need(sym: Optional[Symbol]) -> Symbol:
    if sym is None:
        raise MalformedSpec("this command needs a symbol (--symbol FILE or --inline JSON)")
    return sym


def _verdict_exit(verdict: Optional[str]) -> int:
    return EXIT_INCONCLUSIVE if verdict == criteria.INCONCLUSIVE else EXIT_OK


# Commands

def cmd_validate(args, settings, sym) -> Result:
    report = validate_class(_need(sym))
    logger.info(report.summary())
    return {**report.to_dict(), 'summary': report.summary()}, None, EXIT_OK if report.valid else EXIT_ERROR


def cmd_heatmap(args, settings, sym) -> Result:
    sym = _need(sym)
    grid = HeatmapGrid.parse(settings['grid'])
    frame = CountingLab(sym, args.method).heatmap(grid)
    return {'symbol': sym.label, 'grid': grid.to_dict(), 'rows': frame.to_dict(orient='records')}, frame, EXIT_OK


def cmd_schatten(args, settings, sym) -> Result:
    sym = _need(sym)
    matrix = operator_lab.build_matrix(sym, settings['nbasis'], settings['ntrunc'])
    report = operator_lab.singular_values(matrix, args.p or config.SCHATTEN_P_DEFAULT, args.method)
    frame = pd.DataFrame({'k': np.arange(1, report.svals.size + 1), 'sval': report.svals})
    return report.to_dict(), frame, EXIT_OK


def cmd_verify(args, settings, sym) -> Result:
    sym = _need(sym)
    rows = []
    if args.check == 'stanton':
        f = monomial(2, 2)
        check = operator_lab.stanton_check(sym, f, n_trunc=settings['ntrunc'])
        rows.append({**check.to_dict(), 'passed': check.passed(config.STANTON_TOL)})
    elif args.check == 'hs':
        check = operator_lab.hs_identity_check(sym, settings['nbasis'], settings['ntrunc'])
        rows.append({**check.to_dict(), 'passed': check.passed(config.HS_TOL)})
    else:
        rows.append(CountingLab(sym).run_check(args.check).to_dict())
    frame = pd.DataFrame(rows)
    passed = bool(frame['passed'].all())
    if not passed:
        logger.error(f"{args.check} verification failed for {sym.label}")
    return {'check': args.check, 'symbol': sym.label, 'passed': passed, 'rows': rows}, frame, \
        EXIT_OK if passed else EXIT_ERROR


def cmd_criteria(args, settings, sym) -> Result:
    sym = _need(sym)
    p = args.p if args.p is not None else config.CRITERIA_DEFAULT_P[args.kind]
    if args.kind == 'lz':
        reports = [criteria.luecking_zhu(sym, p)]
    elif args.kind == 's2m':
        reports = [criteria.multi_integral_s2m(sym, args.m, seed=settings['seed'])]
    elif args.kind == 'weighted':
        reports = list(criteria.weighted_carleson_criterion(sym, p, args.a))
    else:
        reports = [criteria.bergman_criterion(sym, p, args.a)]
    frame = pd.DataFrame([{'name': r.name, 'value': r.value, 'verdict': r.verdict} for r in reports])
    code = max(_verdict_exit(r.verdict) for r in reports)
    return {'reports': [r.to_dict() for r in reports]}, frame, code


def cmd_carleson(args, settings, sym) -> Result:
    if args.kind == 'schur':
        demo = criteria.carleson_schur_demo(args.n)
        return demo.to_dict(), demo.to_frame(), EXIT_OK
    measure = criteria.schur_measure(args.n)
    report = criteria.carleson_box_constant(measure, boxes=criteria.aligned_boxes(measure.points))
    return report.to_dict(), report.table, EXIT_OK


def cmd_polytorus(args, settings, sym) -> Result:
    sym = _need(sym)
    cfg = polytorus.McConfig(n_samples=args.samples, seed=settings['seed'])
    if args.kind == 'boundary':
        rng = np.random.default_rng(cfg.seed)
        values = polytorus.boundary_values(sym, polytorus.sample_characters(cfg, rng, args.samples), cfg)
        frame = pd.DataFrame({'re_phi': values.real, 'im_phi': values.imag})
        payload = {'symbol': sym.label, 'n_samples': int(values.size), 'seed': cfg.seed,
                   'min_re': float(values.real.min()), 'mean': [float(values.mean().real), float(values.mean().imag)]}
        return payload, frame, EXIT_OK
    if args.kind == 's2m':
        estimate = polytorus.mc_schatten_boundary(sym, args.m, cfg)
        return estimate.to_dict(), pd.DataFrame([estimate.to_dict()]), _verdict_exit(estimate.verdict)
    ratios = polytorus.hp_ratio_check(sym, args.p, cfg)
    return ratios, pd.DataFrame({'ratio': ratios['ratios']}), EXIT_OK


COMMANDS = {
    'validate': cmd_validate,
    'heatmap': cmd_heatmap,
    'schatten': cmd_schatten,
    'verify': cmd_verify,
    'criteria': cmd_criteria,
    'carleson': cmd_carleson,
    'polytorus': cmd_polytorus,
}


def _add_common_flags(parser: argparse.ArgumentParser, nested: bool) -> None:
    """Shared flags; subcommand copies leave values set before the subcommand alone"""
    default = argparse.SUPPRESS if nested else None
    parser.add_argument('--symbol', default=default, help='path to a symbol JSON file')
    parser.add_argument('--inline', default=default, help='symbol JSON given inline')
    parser.add_argument('--out', default=default, help='write a .csv or .json artifact')
    parser.add_argument('--seed', type=int, default=default)
    parser.add_argument('--nbasis', type=int, default=default)
    parser.add_argument('--ntrunc', type=int, default=default)
    parser.add_argument('--grid', default=default, help='reMin,reMax,imMin,imMax,nx,ny')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='dirichlet-lab', description=__doc__.strip().splitlines()[0])
    _add_common_flags(parser, nested=False)
    sub = parser.add_subparsers(dest='command', required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_text)
        _add_common_flags(cmd, nested=True)
        return cmd

    add('validate', 'class membership report')
    cmd = add('heatmap', 'counting function on a grid')
    cmd.add_argument('--method', default='auto', choices=['auto', 'exact_disk', 'strip'])
    cmd = add('schatten', 'singular values and Schatten norms')
    cmd.add_argument('--p', type=float, nargs='+')
    cmd.add_argument('--method', default='jacobi', choices=['jacobi', 'eigh'])
    cmd = add('verify', 'identity and inequality checks')
    cmd.add_argument('check', choices=['stanton', 'hs', 'littlewood', 'lindelof', 'submean'])
    cmd = add('criteria', 'integral Schatten criteria')
    cmd.add_argument('kind', choices=['lz', 's2m', 'weighted', 'bergman'])
    cmd.add_argument('--p', type=float, default=None, help='exponent (default 2, or 4 for bergman)')
    cmd.add_argument('--a', type=float, default=2.0)
    cmd.add_argument('--m', type=int, default=1)
    cmd = add('carleson', 'Carleson measure demonstrations')
    cmd.add_argument('kind', choices=['schur', 'box'])
    cmd.add_argument('--n', type=int, default=30)
    cmd = add('polytorus', 'Monte Carlo over characters')
    cmd.add_argument('kind', choices=['boundary', 's2m', 'hp'],
                     help='boundary values, S_2m boundary estimate, or hp: experimental ||C P||_p/||P||_p '
                          'ratio check on random Dirichlet polynomials (does not decide H^p boundedness)')
    cmd.add_argument('--m', type=int, default=1)
    cmd.add_argument('--p', type=float, default=2.0)
    cmd.add_argument('--samples', type=int, default=config.MC_SAMPLES)
    return parser


def run_config(args: argparse.Namespace, settings: Dict[str, Any], sym_spec: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """Fully resolved configuration embedded in every artifact"""
    params = {k: v for k, v in vars(args).items()
              if k not in ('symbol', 'inline', 'out', 'seed', 'nbasis', 'ntrunc', 'grid')}
    return {**settings, **params, 'symbol': sym_spec}


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = resolve_settings(args)
        sym = load_symbol(args) if (args.symbol or args.inline) else None
        cfg = run_config(args, settings, symbol_to_spec(sym) if sym is not None else None)
        payload, frame, code = COMMANDS[args.command](args, settings, sym)
    except LabError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"{e.label}: {e}", file=sys.stderr)
        return EXIT_ERROR

    if args.out:
        write_artifact(args.out, payload, frame, cfg)
    elif frame is not None and args.command in ('heatmap', 'verify', 'criteria', 'carleson'):
        sys.stdout.write(to_csv(frame, cfg))
    else:
        sys.stdout.write(to_json(payload, cfg) + '\n')
    if code == EXIT_ERROR and args.command == 'verify':
        print('verification failed', file=sys.stderr)
    return code


if __name__ == '__main__':
    sys.exit(main())
