"""Main CLI entry point for SymCentral."""
import argparse
import logging
import sys
from pathlib import Path

from symcentral.__version__ import __version__
from symcentral.utils.errors import SymCentralError
from symcentral.utils.io_utils import dumps_json

logger = logging.getLogger(__name__)

EPILOG = """
Examples:
  # Groups and orbit types
  symcentral groups list
  symcentral groups show D_4
  symcentral orbits --group T_d

  # Solving an ansatz
  symcentral solve --ansatz truncated_tetrahedron_ansatz.json --seed 1 --csv points.csv
  symcentral census --ansatz d2_census_ansatz.json --starts 256
  symcentral components --ansatz euler_collinear_ansatz.json
  symcentral scan --ansatz twelve_body_d3_ansatz.json --slot 2 --mass 0.5:2.0:16

  # Checking a configuration
  symcentral verify --config lagrange_triangle_config.json
  symcentral verify --config twelve_body_d3_config.json --group D_3
  symcentral spectrum --config cuboctahedron_config.json --group O_h
  symcentral dynamics --config lagrange_triangle_config.json --mode rotation

  # Balanced configurations
  symcentral balanced --ansatz c2h_ansatz.json --sigma 0.7,0.3,0.0

  # Use custom config
  symcentral --config my_config.yaml solve --ansatz file.json

For detailed help: symcentral <command> --help
"""


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog='symcentral',
        description='SymCentral - symmetric central and balanced configurations',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    parser.add_argument('--version', action='version', version=f'SymCentral v{__version__}')
    parser.add_argument('--config', type=Path, help='Custom config file (YAML)')
    parser.add_argument('-v', '--verbose', action='store_true', help='Enable DEBUG logging')
    parser.add_argument('-q', '--quiet', action='store_true', help='Show warnings and errors only')
    parser.add_argument('--exponent', type=float,
                        help='Potential exponent a in U = sum m m / r^a (overrides the ansatz)')
    parser.add_argument('--workers', type=int, help='Parallel start workers (default: config)')

    subparsers = parser.add_subparsers(dest='command', help='Command to run')

    groups = subparsers.add_parser('groups', help='List catalog groups or show one')
    groups.add_argument('action', choices=['list', 'show'])
    groups.add_argument('name', nargs='?', help='Group name for show (e.g. D_4, T_d)')
    groups.add_argument('--param', type=int, help='Parameter k for C_k, D_k and D_nh')

    orbits = subparsers.add_parser('orbits', help='Orbit-type table of a group')
    orbits.add_argument('--group', required=True, help='Catalog group name')
    orbits.add_argument('--param', type=int, help='Parameter k for C_k, D_k and D_nh')

    solve = subparsers.add_parser('solve', help='Minimize U over a symmetric ansatz')
    solve.add_argument('--ansatz', type=Path, required=True, help='Ansatz JSON file')
    solve.add_argument('--seed', type=int, help='Random seed (default: $SYMCENTRAL_SEED or config)')
    solve.add_argument('--starts', type=int, help='Number of starts (default: solver.starts)')
    solve.add_argument('--csv', type=Path, help='Write the point table to this CSV file')
    solve.add_argument('--out', type=Path, help='Write the configuration JSON to this file')

    census = subparsers.add_parser('census', help='Find and classify critical points')
    census.add_argument('--ansatz', type=Path, required=True, help='Ansatz JSON file')
    census.add_argument('--seed', type=int, help='Random seed')
    census.add_argument('--starts', type=int,
                        help='Newton starts (default: solver.census_starts)')
    census.add_argument('--csv', type=Path, help='Write all point tables to this CSV file')

    verify = subparsers.add_parser('verify', help='Check a configuration for centrality')
    verify.add_argument('--config', dest='config_file', type=Path, required=True,
                        help='Configuration JSON file')
    verify.add_argument('--group', help='Also check symmetry and Burnside type under this group')
    verify.add_argument('--param', type=int, help='Parameter k for C_k, D_k and D_nh')

    balanced = subparsers.add_parser('balanced', help='Balanced configuration with a given spectrum')
    balanced.add_argument('--ansatz', type=Path, required=True, help='Ansatz JSON file')
    balanced.add_argument('--sigma', required=True,
                          help='Comma-separated target eigenvalues of S (e.g. 1.2,0.6,0.2)')
    balanced.add_argument('--seed', type=int, help='Random seed')

    spectrum = subparsers.add_parser('spectrum', help='Inertia matrix and its spectrum')
    spectrum.add_argument('--config', dest='config_file', type=Path, required=True,
                          help='Configuration JSON file')
    spectrum.add_argument('--group', help='Add the Schur block check for this group')
    spectrum.add_argument('--param', type=int, help='Parameter k for C_k, D_k and D_nh')

    dynamics = subparsers.add_parser('dynamics', help='Dynamical certificate of a configuration')
    dynamics.add_argument('--config', dest='config_file', type=Path, required=True,
                          help='Configuration JSON file')
    dynamics.add_argument('--mode', choices=['homothetic', 'rotation'], default='homothetic',
                          help='Release from rest or spin rigidly (default: homothetic)')
    dynamics.add_argument('--t-end', type=float, help='Integration window (default: dynamics.t_end)')
    dynamics.add_argument('--dt', type=float, help='RK4 step (default: dynamics.dt)')
    dynamics.add_argument('--omega-scale', type=float, default=1.0,
                          help='Multiply the rotation rate (rotation mode only)')
    dynamics.add_argument('--csv', type=Path, help='Write the trajectory to this CSV file')

    scan = subparsers.add_parser('scan', help='Continue a solution along one slot mass')
    scan.add_argument('--ansatz', type=Path, required=True, help='Ansatz JSON file')
    scan.add_argument('--slot', type=int, required=True, help='Slot index (0-based)')
    scan.add_argument('--mass', required=True, help='START:STOP:COUNT or a comma-separated list')
    scan.add_argument('--alternate', action='store_true',
                      help='Scan the mass of alternate particles of the slot (D_k ansatz, C_k result)')
    scan.add_argument('--seed', type=int, help='Random seed')
    scan.add_argument('--csv', type=Path, help='Write the scan here instead of stdout')

    components = subparsers.add_parser('components',
                                       help='Count connected components of the configuration space')
    components.add_argument('--ansatz', type=Path, required=True, help='Ansatz JSON file')
    return parser


def _emit(obj) -> None:
    sys.stdout.write(dumps_json(obj))


def _group(args):
    from symcentral.core.groups_01 import catalog_group
    return catalog_group(args.group, args.param)


def _ansatz(args):
    from symcentral.core.reduction_04 import load_ansatz
    A = load_ansatz(args.ansatz)
    if args.exponent is not None:
        A = A.with_exponent(args.exponent)
    return A


def _options(args, **overrides):
    from symcentral.core.solver_05 import SolveOptions
    return SolveOptions.from_config(seed=getattr(args, 'seed', None), workers=args.workers,
                                    **overrides)


def _groups(args) -> int:
    from symcentral.core.groups_01 import (
        CATALOG_DESCRIPTIONS, CATALOG_NAMES, catalog_group, isotypic_decomposition,
    )
    if args.action == 'list':
        rows = []
        for name in CATALOG_NAMES:
            entry = {'name': name, 'description': CATALOG_DESCRIPTIONS[name]}
            if not name.endswith(('_k', '_nh')):
                entry['order'] = catalog_group(name).order
            rows.append(entry)
        _emit({'groups': rows})
        return 0
    G = catalog_group(args.name, args.param)
    _emit({
        'name': G.name,
        'dim': G.dim,
        'order': G.order,
        'generators': [m.tolist() for m in G.generator_matrices()],
        'isotypic': isotypic_decomposition(G).to_dict()['blocks'],
    })
    return 0


def _orbits(args) -> int:
    from symcentral.core.strata_02 import orbit_type_table
    table = orbit_type_table(_group(args))
    rows = []
    for ot in table.orbit_types:
        stratum = table.strata[ot.class_id]
        rows.append({
            'class': ot.name,
            'order': ot.representative.order,
            'orbit_size': ot.orbit_size,
            'fixed_dim': ot.fixed_dim,
            'components': stratum.n_components,
            'labels': [t.label for t in table.topo_types if t.base is ot],
        })
    _emit({'group': table.group.name, 'orbit_types': rows})
    return 0


def _solve(args) -> int:
    from symcentral.core.nbody_03 import save_configuration, write_points_csv
    from symcentral.core.solver_05 import minimize
    A = _ansatz(args)
    cp = minimize(A, _options(args, starts=args.starts))
    if args.csv:
        write_points_csv(cp.configuration, args.csv)
    if args.out:
        save_configuration(cp.configuration, args.out)
    _emit({
        'ansatz': A.to_dict(),
        'burnside': A.burnside_type().to_text(),
        'solutions': [cp.to_dict()],
    })
    return 0


def _census(args) -> int:
    from symcentral.core.nbody_03 import points_rows
    from symcentral.core.solver_05 import find_critical_points
    from symcentral.utils.io_utils import write_csv
    A = _ansatz(args)
    census = find_critical_points(A, _options(args, census_starts=args.starts))
    if args.csv:
        rows = []
        for k, cp in enumerate(census.distinct):
            rows.extend(points_rows(cp.configuration, solution=k))
        write_csv(rows, args.csv)
    out = {'ansatz': A.to_dict(), 'burnside': A.burnside_type().to_text()}
    out.update(census.to_dict())
    _emit(out)
    return 0


def _verify(args) -> int:
    from symcentral.core.balanced_06 import balanced_residual
    from symcentral.core.nbody_03 import (
        central_residual, load_configuration, moment_of_inertia, potential,
    )
    from symcentral.core.reduction_04 import check_symmetric
    from symcentral.core.strata_02 import burnside_type_of
    exponent = args.exponent if args.exponent is not None else 1.0
    C = load_configuration(args.config_file)
    lam, residual = central_residual(C, exponent)
    bal = balanced_residual(C, exponent)
    out = {
        'n': C.n,
        'dim': C.dim,
        'U': potential(C, exponent),
        'I': moment_of_inertia(C),
        'lambda': lam,
        'central_residual': residual,
        'balanced': {
            'B': bal.B.tolist(),
            'residual': bal.residual,
            'is_central': bal.is_central,
            'degenerate': bal.degenerate,
        },
    }
    if args.group:
        G = _group(args)
        ok, failing = check_symmetric(G, C)
        out['group'] = G.name
        out['symmetric'] = ok
        if ok:
            out['burnside'] = burnside_type_of(G, C).to_text()
        else:
            out['failing_generator'] = failing
    _emit(out)
    return 0


def _balanced(args) -> int:
    from symcentral.core.balanced_06 import SpectrumTarget, solve_balanced
    from symcentral.utils.io_utils import parse_float_list
    target = SpectrumTarget(parse_float_list(args.sigma))
    A = _ansatz(args)
    result = solve_balanced(A, target, _options(args))
    out = {'ansatz': A.to_dict(), 'target': target.sigma.tolist()}
    out.update(result.to_dict())
    _emit(out)
    return 0


def _spectrum(args) -> int:
    from symcentral.core.balanced_06 import schur_check
    from symcentral.core.nbody_03 import inertia_matrix, load_configuration
    C = load_configuration(args.config_file)
    out = inertia_matrix(C).to_dict()
    if args.group:
        out['schur'] = schur_check(_group(args), C).to_dict()
    _emit(out)
    return 0


def _dynamics(args) -> int:
    from symcentral.core.dynamics_07 import (
        homothetic_report, integrate, rotation_report, rotation_velocities,
        write_trajectory_csv,
    )
    from symcentral.core.nbody_03 import center, load_configuration, normalize_inertia
    exponent = args.exponent if args.exponent is not None else 1.0
    C = load_configuration(args.config_file)
    if args.mode == 'homothetic':
        report = homothetic_report(C, args.t_end, args.dt, exponent)
    else:
        report = rotation_report(C, args.t_end, args.dt, exponent, args.omega_scale)
    if args.csv:
        C0 = normalize_inertia(center(C))
        if args.mode == 'homothetic':
            v0 = 0.0 * C0.points
        else:
            v0, _ = rotation_velocities(C0, args.omega_scale, exponent)
        write_trajectory_csv(integrate(C0, v0, report.t_end, report.dt, exponent), args.csv)
    _emit(report.to_dict())
    return 0


def _scan(args) -> int:
    from symcentral.advanced.continuation_01 import mass_scan, scan_rows
    from symcentral.core.reduction_04 import split_slot_masses
    from symcentral.utils.io_utils import dumps_csv, parse_range, write_csv
    masses = parse_range(args.mass)
    A = _ansatz(args)
    opts = _options(args)
    slot, coords = args.slot, None
    if args.alternate:
        from symcentral.core.solver_05 import minimize, solution_coords
        cp = minimize(A, opts)
        factor = masses[0] / A.slots[args.slot].mass
        A, coords, slot = split_slot_masses(A, args.slot, factor, solution_coords(A, cp))
    results = mass_scan(A, slot, masses, opts, coords=coords)
    rows = scan_rows(results, masses)
    if args.csv:
        write_csv(rows, args.csv)
    else:
        sys.stdout.write(dumps_csv(rows))
    return 0


def _components(args) -> int:
    from symcentral.advanced.components_02 import component_census, component_factors
    A = _ansatz(args)
    factors = component_factors(A)
    _emit({
        'burnside': A.burnside_type().to_text(),
        'components': component_census(A, factors),
        'factors': factors,
    })
    return 0


COMMANDS = {
    'groups': _groups,
    'orbits': _orbits,
    'solve': _solve,
    'census': _census,
    'verify': _verify,
    'balanced': _balanced,
    'spectrum': _spectrum,
    'dynamics': _dynamics,
    'scan': _scan,
    'components': _components,
}


def _main(argv=None) -> int:
    """Parse arguments and run one command."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    else:
        level = logging.INFO
    logging.basicConfig(level=level, format='%(levelname)s: %(message)s')

    if args.command is None:
        parser.print_help()
        return 0

    if args.config:
        from symcentral.config import load_config
        load_config(args.config)

    if args.command == 'groups' and args.action == 'show' and not args.name:
        parser.error('groups show needs a group name')
    if args.workers is not None and args.workers < 1:
        parser.error('--workers must be >= 1')
    for flag in ('starts', 't_end', 'dt'):
        value = getattr(args, flag, None)
        if value is not None and not value > 0:
            parser.error(f"--{flag.replace('_', '-')} must be positive")

    return COMMANDS[args.command](args)


def run(argv=None) -> int:
    """Run the CLI and map failures onto exit codes.

    SymCentral errors are reported as one JSON object on stderr; interrupts
    return 130 and anything unexpected 2 (re-raised under -v).
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    verbose = ('-v' in argv) or ('--verbose' in argv)
    try:
        return _main(argv)
    except KeyboardInterrupt:
        sys.stderr.write("\nInterrupted.\n")
        return 130
    except SystemExit as e:
        if e.code is None or isinstance(e.code, int):
            return e.code or 0
        return 1
    except SymCentralError as e:
        sys.stderr.write(dumps_json({
            'error': type(e).__name__,
            'message': str(e),
            'exit_code': e.exit_code,
        }))
        return e.exit_code
    except Exception as e:
        if verbose:
            raise
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return 2


def main(argv=None) -> int:
    """Console-script entry point."""
    return run(argv)


if __name__ == '__main__':
    sys.exit(main())
