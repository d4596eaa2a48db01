"""
On-disk formats: binary instance files, result and trace CSVs, vector and box files.

Instance file layout (little-endian):
    b"PSGB1\\n", uint64 m, n, w, seed, then float64 arrays
    A (column-major, m*n), b (m), x* (n), l (n), u (n).
"""
import csv
import logging
import math
from pathlib import Path

import numpy as np

from core.numerics.exceptions import InstanceFormatError
from core.numerics.model import BoxConstraint, GroupPartition

from .instances import ExperimentInstance

logger = logging.getLogger(__name__)

MAGIC = b'PSGB1\n'
_HEADER = np.dtype('<u8')
_FLOAT = np.dtype('<f8')

RESULT_COLUMNS = [
    'n', 'm', 's', 'w', 'sigma', 'seed', 'lambda', 'mu', 'tau', 'x0', 'box',
    'iters', 'time_s', 'err', 'psnr', 'phi_final', 'support_changes', 'status', 'success',
]
TRACE_COLUMNS = ['k', 'phi', 'step_norm', 'l0', 'l20']


def format_float(value):
    if value is None:
        return ''
    value = float(value)
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return f'{value:.17g}'


def instance_to_bytes(instance):
    header = np.array([instance.m, instance.n, instance.w, instance.seed], dtype=_HEADER)
    arrays = [
        np.asarray(instance.A, dtype=float).ravel(order='F'),
        instance.b,
        instance.x_star,
        instance.box.lower,
        instance.box.upper,
    ]
    body = np.concatenate([np.asarray(a, dtype=float).reshape(-1) for a in arrays]).astype(_FLOAT)
    return MAGIC + header.tobytes() + body.tobytes()


def instance_from_bytes(data, sigma=math.nan):
    """
    Rebuild an instance. The file does not carry sigma, so it is supplied by the
    caller (NaN when unknown).
    """
    if not data.startswith(MAGIC):
        raise InstanceFormatError('Not an instance file (bad magic bytes)')
    offset = len(MAGIC)
    header_size = 4 * _HEADER.itemsize
    if len(data) < offset + header_size:
        raise InstanceFormatError('Instance file truncated inside the header')
    m, n, w, seed = (int(v) for v in np.frombuffer(data, dtype=_HEADER, count=4, offset=offset))
    offset += header_size
    count = m * n + m + 3 * n
    expected = offset + count * _FLOAT.itemsize
    if len(data) != expected:
        raise InstanceFormatError(f'Instance file has {len(data)} bytes, expected {expected} for m={m}, n={n}')
    if w < 1 or n % w != 0:
        raise InstanceFormatError(f'Group width {w} does not divide n={n}')

    values = np.frombuffer(data, dtype=_FLOAT, count=count, offset=offset).astype(float)
    cursor = 0

    def take(size):
        nonlocal cursor
        chunk = values[cursor:cursor + size]
        cursor += size
        return chunk

    A = np.asfortranarray(take(m * n).reshape((m, n), order='F'))
    b = take(m)
    x_star = take(n)
    box = BoxConstraint(take(n), take(n))
    partition = GroupPartition.contiguous(n, w)
    nonzero = x_star != 0.0
    per_group = np.bincount(partition.labels, weights=nonzero.astype(float), minlength=partition.q)
    return ExperimentInstance(
        A=A,
        b=b.copy(),
        x_star=x_star.copy(),
        sigma=float(sigma),
        w=w,
        s=int(nonzero.sum()),
        s_groups=int(np.count_nonzero(per_group)),
        box=box,
        partition=partition,
        seed=seed,
    )


def write_instance(path, instance):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(instance_to_bytes(instance))
    except OSError as e:
        raise OSError(f'Could not write instance file {path}: {e}') from e
    logger.info(f'Instance written to {path}')
    return path


def read_instance(path, sigma=math.nan):
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise OSError(f'Could not read instance file {path}: {e}') from e
    return instance_from_bytes(data, sigma=sigma)


def result_row(record):
    """CSV cells for a RunRecord, floats with 17 significant digits."""
    row = record.as_dict()
    cells = []
    for column in RESULT_COLUMNS:
        value = row[column]
        if isinstance(value, bool):
            cells.append('true' if value else 'false')
        elif isinstance(value, float):
            cells.append(format_float(value))
        else:
            cells.append(str(value))
    return cells


def write_results(stream, records, header=True):
    writer = csv.writer(stream, lineterminator='\n')
    if header:
        writer.writerow(RESULT_COLUMNS)
    for record in records:
        writer.writerow(result_row(record))


def write_results_csv(path, records, append=False):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        needs_header = not (append and path.exists() and path.stat().st_size > 0)
        with path.open('a' if append else 'w', newline='', encoding='utf-8') as handle:
            write_results(handle, records, header=needs_header)
    except OSError as e:
        raise OSError(f'Could not write results file {path}: {e}') from e
    logger.info(f'Wrote {len(records)} result rows to {path}')
    return path


def read_results_csv(path):
    with Path(path).open(newline='', encoding='utf-8') as handle:
        return list(csv.DictReader(handle))


def write_trace_csv(path, trace):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open('w', newline='', encoding='utf-8') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(TRACE_COLUMNS)
            for record in trace.records:
                writer.writerow([
                    record.k,
                    format_float(record.phi),
                    format_float(record.step_norm),
                    record.l0,
                    record.l20,
                ])
    except OSError as e:
        raise OSError(f'Could not write trace file {path}: {e}') from e
    logger.info(f'Trace with {len(trace.records)} records written to {path}')
    return path


def read_vector(path):
    """A raw vector: .npy, or whitespace/newline separated text."""
    path = Path(path)
    try:
        if path.suffix == '.npy':
            vector = np.load(path)
        else:
            vector = np.loadtxt(path, ndmin=1)
    except (OSError, ValueError) as e:
        raise InstanceFormatError(f'Could not read vector file {path}: {e}') from e
    return np.asarray(vector, dtype=float).reshape(-1)


def read_box_file(path):
    """
    Box bounds: .npz with arrays `l` and `u`, or text with two columns l u per
    coordinate ('inf' allowed).
    """
    path = Path(path)
    try:
        if path.suffix == '.npz':
            with np.load(path) as data:
                lower, upper = data['l'], data['u']
        else:
            table = np.loadtxt(path, ndmin=2)
            if table.shape[1] != 2:
                raise InstanceFormatError(f'Box file {path} must have two columns, found {table.shape[1]}')
            lower, upper = table[:, 0], table[:, 1]
    except (OSError, KeyError, ValueError) as e:
        raise InstanceFormatError(f'Could not read box file {path}: {e}') from e
    return BoxConstraint(lower, upper)
