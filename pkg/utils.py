import json
import logging
import math
import sys
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from exceptions import SignalError, StateError
from oscillator.driven_sim import ControlSignal

FLOAT_FORMAT = '%.16e'


def parse_state(text: str) -> Dict[int, complex]:
    """
    Parse a sparse Fock state "index:re[:im][,index:re[:im]...]".

    >>> parse_state("0:0.5,3:0.1:-0.2")
    {0: (0.5+0j), 3: (0.1-0.2j)}
    """
    entries = {}
    for chunk in filter(None, (part.strip() for part in text.split(','))):
        fields = chunk.split(':')
        if len(fields) not in (2, 3):
            raise StateError(f"bad state entry {chunk!r}; expected index:re[:im]")
        try:
            index = int(fields[0])
            value = complex(float(fields[1]), float(fields[2]) if len(fields) == 3 else 0.0)
        except ValueError:
            raise StateError(f"bad state entry {chunk!r}; expected index:re[:im]")
        if index in entries:
            raise StateError(f"level {index} given twice")
        entries[index] = value
    if not entries:
        raise StateError("empty state specification")
    return entries


def parse_signal(text: str) -> ControlSignal:
    """
    Parse a control signal: "zero", "constant:F", "sin:amp,freq,phase" or
    "pwc:t0=level0,t1=level1,...".
    """
    kind, _, body = text.strip().partition(':')
    try:
        if kind == 'zero':
            return ControlSignal.zero()
        if kind == 'constant':
            return ControlSignal.constant(float(body))
        if kind == 'sin':
            amplitude, frequency, phase = (float(v) for v in body.split(','))
            return ControlSignal.sinusoid(amplitude, frequency, phase)
        if kind == 'pwc':
            pairs = [item.split('=') for item in body.split(',') if item.strip()]
            breakpoints = [float(t) for t, _ in pairs]
            levels = [float(level) for _, level in pairs]
            return ControlSignal.piecewise(breakpoints, levels)
    except SignalError:
        raise
    except ValueError as e:
        raise SignalError(f"bad signal specification {text!r}: {str(e)}")
    raise SignalError(f"unknown signal kind in {text!r}; use zero, constant, sin or pwc")


def parse_times(text: str) -> List[float]:
    try:
        times = [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise ValueError(f"bad time list {text!r}")
    if not times:
        raise ValueError("empty time list")
    return times


def parse_grid(text: str) -> np.ndarray:
    """"start:stop:count" -> count evenly spaced values including both ends."""
    try:
        start, stop, count = text.split(':')
        values = np.linspace(float(start), float(stop), int(count))
    except ValueError:
        raise ValueError(f"bad grid {text!r}; expected start:stop:count")
    if values.size < 1:
        raise ValueError(f"grid {text!r} is empty")
    return values


def _native(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, np.generic):
        return _native(value.item())
    return value


def render_table(df: pd.DataFrame, fmt: str, config_echo: dict, extra: Optional[dict] = None) -> str:
    """Render a result table as CSV (17 significant digits) or as one JSON object."""
    df = df.copy()
    float_cols = df.select_dtypes(include='float').columns
    df[float_cols] = df[float_cols] + 0.0  # fold -0.0 into 0.0

    if fmt == 'csv':
        return df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')

    payload = {
        'config': {k: _native(v) for k, v in config_echo.items()},
        'columns': list(df.columns),
        'data': {col: [_native(v) for v in df[col].tolist()] for col in df.columns},
    }
    if extra:
        payload.update({k: ({kk: _native(vv) for kk, vv in v.items()} if isinstance(v, dict) else _native(v))
                        for k, v in extra.items()})
    return json.dumps(payload, indent=2, sort_keys=False, allow_nan=False) + '\n'


def write_output(text: str, out: Optional[str] = None) -> None:
    """Write rendered output to a file (UTF-8, LF) or to standard output."""
    if out:
        with open(out, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        logging.getLogger(__name__).info(f"Saved output to {out}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
