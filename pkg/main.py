import argparse
import sys

from cli import EXIT_USAGE, RunConfig, run, setup_logging
from config import Config
from exceptions import DampedOscillatorError


class UsageError(DampedOscillatorError):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors raised instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument('--omega', type=float, required=True, help='Natural frequency (> gamma)')
    common.add_argument('--gamma', type=float, default=None, help='Damping rate (>= 0, default 0; not accepted by sweep)')
    common.add_argument('--hbar', type=float, default=None, help='Reduced Planck constant (default from DAMPEDQM_HBAR)')
    common.add_argument('--format', choices=('csv', 'json'), default='csv', help='Output format')
    common.add_argument('--out', default=None, help='Write output to this file instead of stdout')

    def stepping(p, t_end=None):
        p.add_argument('--t-end', dest='t_end', type=float, default=t_end, required=t_end is None,
                       help='Integration horizon')
        p.add_argument('--dt', type=float, default=0.01, help='Step size')

    def state(p):
        p.add_argument('--state', default='0:1', help='Sparse Fock state "n:re[:im],..."')
        p.add_argument('--dim', type=int, default=None, help='Truncation dimension (default: highest level + 1)')

    parser = ArgumentParser(description='Damped harmonic oscillator: classical, mode and quantum pictures')
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('spectrum', parents=[common], help='Energy levels for n = 0..n_max')
    p.add_argument('--n-max', dest='n_max', type=int, default=10)
    p.add_argument('--variant', choices=('corrected', 'naive', 'tilde'), default='corrected')

    p = commands.add_parser('classical', parents=[common], help='RK4 trajectory alongside the analytic solution')
    p.add_argument('--x0', type=float, default=1.0)
    p.add_argument('--p0', type=float, default=0.0)
    stepping(p)

    p = commands.add_parser('evolve', parents=[common], help='Quantum state evolution under the complex Hamiltonian')
    state(p)
    stepping(p, t_end=1.0)
    p.add_argument('--times', default=None, help='Comma-separated sample times (overrides --t-end/--dt)')

    p = commands.add_parser('equivalence', parents=[common], help='Real-time vs complex-time picture comparison')
    state(p)
    stepping(p, t_end=1.0)
    p.add_argument('--times', default=None, help='Comma-separated sample times (overrides --t-end/--dt)')

    p = commands.add_parser('driven', parents=[common], help='Driven oscillator response')
    p.add_argument('--x0', type=float, default=0.0)
    p.add_argument('--p0', type=float, default=0.0)
    p.add_argument('--signal', default='zero', help='zero | constant:F | sin:amp,freq,phase | pwc:t=v,...')
    stepping(p)

    p = commands.add_parser('sweep', parents=[common], help='Evolve one state over a grid of damping rates')
    p.add_argument('--gamma-grid', dest='gamma_grid', required=True, help='start:stop:count')
    p.add_argument('--times', default='0,1', help='Comma-separated sample times')
    state(p)

    p = commands.add_parser('verify', parents=[common], help='Run the identity checks')
    p.add_argument('--seed', type=int, default=None, help='RNG seed (default from DAMPEDQM_VERIFY_SEED)')
    p.add_argument('--samples', type=int, default=None, help='Random samples per check')

    return parser


def main(argv=None) -> int:
    logger = setup_logging()

    try:
        Config.validate()
        args = build_parser().parse_args(argv)
        return run(RunConfig.from_args(args))
    except (DampedOscillatorError, ValueError) as e:
        logger.error(str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
