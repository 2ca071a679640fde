import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from config import Config
from oscillator.base_integrator import time_grid
from oscillator.classical_core import ClassicalState, OscillatorParams, analytic_trajectory, integrate_homogeneous
from oscillator.complex_time import complex_time_of, picture_equivalence_report, tilde_spectrum
from oscillator.driven_sim import integrate_driven, response_metrics
from oscillator.quantum_evolution import FockState, evolve, naive_spectrum, number_expectation, spectrum
from exceptions import ExtinctStateError, ParameterError
from utils import parse_grid, parse_signal, parse_state, parse_times, render_table, write_output
from verification import VerificationSuite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2

COMMON_KEYS = ('command', 'omega', 'gamma', 'hbar', 'format', 'out')

# (table, extra JSON members, exit status)
CommandResult = Tuple[pd.DataFrame, dict, int]


def setup_logging():
    handlers = [logging.StreamHandler()]
    if Config.LOG_FILE:
        handlers.append(logging.FileHandler(Config.LOG_FILE))
    logging.basicConfig(
        level=Config.LOG_LEVEL,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )
    return logging.getLogger(__name__)


@dataclass
class RunConfig:
    command: str
    params: OscillatorParams
    options: Dict[str, object] = field(default_factory=dict)
    fmt: str = 'csv'
    out: Optional[str] = None

    @classmethod
    def from_args(cls, args) -> 'RunConfig':
        values = vars(args)
        hbar = Config.DEFAULT_HBAR if values.get('hbar') is None else values['hbar']
        gamma = values.get('gamma')
        if values['command'] == 'sweep':
            if gamma is not None:
                raise ParameterError("sweep takes its damping rates from --gamma-grid, not --gamma")
            # each grid point is validated when the sweep is planned
            gamma = 0.0
        elif gamma is None:
            gamma = 0.0
        params = OscillatorParams(values['omega'], gamma, hbar)
        options = {k: v for k, v in values.items() if k not in COMMON_KEYS}
        return cls(values['command'], params, options, values.get('format') or 'csv', values.get('out'))

    def echo(self) -> dict:
        echoed = {'command': self.command, **self.params.as_dict()}
        if self.command == 'sweep':
            echoed.pop('gamma')
        echoed.update({k: v for k, v in sorted(self.options.items()) if v is not None})
        return echoed


def _initial_state(config: RunConfig) -> Tuple[FockState, float]:
    psi0, factor = FockState.from_sparse(parse_state(config.options['state']), config.options.get('dim'))
    logging.getLogger(__name__).info(f"Initial state normalised with factor {factor!r} (dim={psi0.dim})")
    return psi0, factor


def _sample_times(config: RunConfig) -> np.ndarray:
    if config.options.get('times'):
        return np.asarray(parse_times(config.options['times']), dtype=float)
    return time_grid(config.options['t_end'], config.options['dt'])


def _n_expect(report) -> float:
    try:
        return number_expectation(report)
    except ExtinctStateError:
        return math.nan


def run_spectrum(config: RunConfig) -> CommandResult:
    n_max = config.options['n_max']
    variant = config.options.get('variant', 'corrected')
    if variant == 'tilde':
        lines = tilde_spectrum(config.params, n_max)
        df = pd.DataFrame({'n': [line.n for line in lines],
                           're_E': [line.energy for line in lines],
                           'im_E': [0.0] * len(lines)})
        return df, {}, EXIT_OK

    if variant == 'naive':
        logging.getLogger(__name__).warning("Naive spectrum ignores the ground-state restriction and is not physical")
        lines = naive_spectrum(config.params, n_max)
    else:
        lines = spectrum(config.params, n_max)
    df = pd.DataFrame({'n': [line.n for line in lines],
                       're_E': [line.energy.real for line in lines],
                       'im_E': [line.energy.imag for line in lines]})
    return df, {}, EXIT_OK


def run_classical(config: RunConfig) -> CommandResult:
    s0 = ClassicalState(config.options['x0'], config.options['p0'])
    traj = integrate_homogeneous(config.params, s0, config.options['t_end'], config.options['dt'])
    exact = analytic_trajectory(config.params, s0, traj.times)
    df = traj.to_frame()
    df['x_analytic'] = exact[:, 0]
    df['p_analytic'] = exact[:, 1]
    return df, {}, EXIT_OK


def run_evolve(config: RunConfig) -> CommandResult:
    psi0, factor = _initial_state(config)
    rows = []
    for t in _sample_times(config):
        report = evolve(config.params, psi0, float(t))
        rows.append({'t': float(t), 'norm_sq': report.norm_sq,
                     'ground_overlap_re': report.ground_overlap.real,
                     'ground_overlap_im': report.ground_overlap.imag,
                     'n_expect': _n_expect(report)})
    return pd.DataFrame(rows), {'normalization_factor': factor}, EXIT_OK


def run_equivalence(config: RunConfig) -> CommandResult:
    psi0, factor = _initial_state(config)
    times = [float(t) for t in _sample_times(config)]
    rows = picture_equivalence_report(config.params, psi0, times)
    taus = [complex_time_of(config.params, t) for t in times]
    df = pd.DataFrame({
        't': [row.t for row in rows],
        'tau_re': [ct.tau.real for ct in taus],
        'tau_im': [ct.tau.imag for ct in taus],
        'tau_abs': [ct.modulus for ct in taus],
        'deviation': [row.deviation for row in rows],
        'passed': [row.passed for row in rows],
    })
    status = EXIT_OK if all(row.passed for row in rows) else EXIT_VERIFICATION
    return df, {'normalization_factor': factor}, status


def run_driven(config: RunConfig) -> CommandResult:
    s0 = ClassicalState(config.options['x0'], config.options['p0'])
    signal = parse_signal(config.options['signal'])
    traj = integrate_driven(config.params, s0, signal, config.options['t_end'], config.options['dt'])
    metrics = response_metrics(traj)
    return traj.to_frame(), {'metrics': metrics.as_dict()}, EXIT_OK


def run_sweep(config: RunConfig) -> CommandResult:
    logger = logging.getLogger(__name__)
    gammas = parse_grid(config.options['gamma_grid'])
    plans = [OscillatorParams(config.params.omega, float(g), config.params.hbar) for g in gammas]
    psi0, _ = _initial_state(config)
    times = [float(t) for t in parse_times(config.options.get('times') or '0,1')]

    def evaluate(indexed) -> list:
        index, params = indexed
        first_line = spectrum(params, 1)[1].energy
        deviations = {row.t: row.deviation for row in picture_equivalence_report(params, psi0, times)}
        rows = []
        for t in times:
            report = evolve(params, psi0, t)
            rows.append({'index': index, 'omega': params.omega, 'gamma': params.gamma,
                         'hbar': params.hbar, 'omega1': params.omega1,
                         'state': config.options['state'], 'dim': psi0.dim, 't': t,
                         're_E1': first_line.real, 'im_E1': first_line.imag,
                         'norm_sq': report.norm_sq, 'n_expect': _n_expect(report),
                         'picture_deviation': deviations[t]})
        return rows

    logger.info(f"Sweeping {len(plans)} gamma values on {Config.SWEEP_WORKERS} workers")
    with ThreadPoolExecutor(max_workers=Config.SWEEP_WORKERS) as pool:
        # map keeps grid order whatever the completion order
        results = list(pool.map(evaluate, enumerate(plans)))
    return pd.DataFrame([row for rows in results for row in rows]), {}, EXIT_OK


def run_verify(config: RunConfig) -> CommandResult:
    suite = VerificationSuite(config.params, seed=config.options.get('seed'),
                              samples=config.options.get('samples'))
    results = suite.run()
    status = EXIT_OK if all(r.passed for r in results) else EXIT_VERIFICATION
    return VerificationSuite.to_frame(results), {}, status


COMMANDS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    'spectrum': run_spectrum,
    'classical': run_classical,
    'evolve': run_evolve,
    'equivalence': run_equivalence,
    'driven': run_driven,
    'sweep': run_sweep,
    'verify': run_verify,
}


def run(config: RunConfig) -> int:
    """Execute one command, write its output, return the exit status."""
    logger = logging.getLogger(__name__)
    logger.info(f"Running {config.command} with {config.params}")
    df, extra, status = COMMANDS[config.command](config)
    write_output(render_table(df, config.fmt, config.echo(), extra), config.out)
    if status == EXIT_VERIFICATION:
        logger.warning(f"{config.command} reported verification failures")
    logger.info(f"Finished {config.command} with exit status {status}")
    return status
