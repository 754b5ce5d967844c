"""CSV serialization for frames, weights, kernel estimators, and result tables.

Complex matrices are stored one row per line with interleaved re,im pairs
(2*cols fields), preceded by a header line ``matrix,<name>,<rows>,<cols>``.
Real matrices use ``rmatrix`` headers with plain fields. Floats are written
with repr, so re-imported values are bit-identical.
"""

import ast
import csv

import numpy as np

from .harness import ResultRow
from .linear import BeamformerWeights
from .rkhs import KernelEstimator, KernelSpec

FRAME_MAGIC = "drbeam-frame"
WEIGHTS_MAGIC = "drbeam-weights"
ESTIMATOR_MAGIC = "drbeam-kernel-estimator"
FORMAT_VERSION = "1"


def _fmt(value):
    return repr(float(value))


def _write_complex(fh, name, a):
    a = np.asarray(a, dtype=complex)
    fh.write(f"matrix,{name},{a.shape[0]},{a.shape[1]}\n")
    for row in a:
        fields = []
        for entry in row:
            fields.append(_fmt(entry.real))
            fields.append(_fmt(entry.imag))
        fh.write(",".join(fields) + "\n")


def _write_real(fh, name, a):
    a = np.asarray(a, dtype=float)
    fh.write(f"rmatrix,{name},{a.shape[0]},{a.shape[1]}\n")
    for row in a:
        fh.write(",".join(_fmt(v) for v in row) + "\n")


class _Reader:
    def __init__(self, fh):
        self.lines = (line.rstrip("\n") for line in fh)

    def next_fields(self):
        for line in self.lines:
            if line.strip():
                return line.split(",")
        raise ValueError("unexpected end of file")

    def read_matrix(self, expect_name=None):
        header = self.next_fields()
        kind = header[0]
        if kind not in ("matrix", "rmatrix") or len(header) != 4:
            raise ValueError(f"bad matrix header: {header}")
        name, rows, cols = header[1], int(header[2]), int(header[3])
        if expect_name is not None and name != expect_name:
            raise ValueError(f"expected matrix {expect_name!r}, found {name!r}")
        data = []
        for _ in range(rows):
            data.append([float(v) for v in self.next_fields()])
        data = np.asarray(data, dtype=float)
        if kind == "rmatrix":
            if data.shape != (rows, cols):
                raise ValueError(f"matrix {name!r} has wrong shape {data.shape}")
            return name, data
        if data.shape != (rows, 2 * cols):
            raise ValueError(f"matrix {name!r} has wrong shape {data.shape}")
        return name, data[:, 0::2] + 1j * data[:, 1::2]


def save_frame(frame, path):
    """Write one pilot frame (S, X, H, R_v) in the documented CSV format."""
    with open(path, "w") as fh:
        fh.write(f"{FRAME_MAGIC},{FORMAT_VERSION}\n")
        _write_complex(fh, "s_block", frame.s_block)
        _write_complex(fh, "x_block", frame.x_block)
        _write_complex(fh, "true_h", frame.true_h)
        _write_complex(fh, "true_r_v", frame.true_r_v)


def load_frame(path):
    from .scene import PilotFrame

    with open(path) as fh:
        reader = _Reader(fh)
        magic = reader.next_fields()
        if magic[0] != FRAME_MAGIC:
            raise ValueError(f"not a frame file: {magic}")
        _, s_block = reader.read_matrix("s_block")
        _, x_block = reader.read_matrix("x_block")
        _, true_h = reader.read_matrix("true_h")
        _, true_r_v = reader.read_matrix("true_r_v")
    return PilotFrame(s_block=s_block, x_block=x_block, true_h=true_h, true_r_v=true_r_v)


def save_weights(weights, path):
    with open(path, "w") as fh:
        fh.write(f"{WEIGHTS_MAGIC},{FORMAT_VERSION}\n")
        fh.write(f"method,{weights.method}\n")
        for key, value in sorted(weights.params.items()):
            if isinstance(value, (int, float, bool)):
                fh.write(f"param,{key},{value!r}\n")
        _write_complex(fh, "w", weights.w)


def load_weights(path):
    with open(path) as fh:
        reader = _Reader(fh)
        magic = reader.next_fields()
        if magic[0] != WEIGHTS_MAGIC:
            raise ValueError(f"not a weights file: {magic}")
        method = reader.next_fields()[1]
        params = {}
        fields = reader.next_fields()
        while fields[0] == "param":
            params[fields[1]] = ast.literal_eval(fields[2])
            fields = reader.next_fields()
        if fields[0] != "matrix":
            raise ValueError("missing weight matrix")
        rows, cols = int(fields[2]), int(fields[3])
        data = []
        for _ in range(rows):
            data.append([float(v) for v in reader.next_fields()])
        data = np.asarray(data)
        w = data[:, 0::2] + 1j * data[:, 1::2]
        if w.shape != (rows, cols):
            raise ValueError("weight matrix has wrong shape")
    return BeamformerWeights(w=w, method=method, params=params)


def save_kernel_estimator(est, path):
    spec = est.kernel
    with open(path, "w") as fh:
        fh.write(f"{ESTIMATOR_MAGIC},{FORMAT_VERSION}\n")
        fh.write(
            f"kernel,{spec.kind},{spec.bandwidth!r},{spec.degree},"
            f"{spec.offset!r},{spec.smoothness!r}\n"
        )
        fh.write(f"method,{est.method}\n")
        _write_real(fh, "anchors", est.anchors)
        _write_real(fh, "weights", est.weights)


def load_kernel_estimator(path):
    with open(path) as fh:
        reader = _Reader(fh)
        magic = reader.next_fields()
        if magic[0] != ESTIMATOR_MAGIC:
            raise ValueError(f"not a kernel estimator file: {magic}")
        kfields = reader.next_fields()
        spec = KernelSpec(
            kind=kfields[1],
            bandwidth=float(kfields[2]),
            degree=int(kfields[3]),
            offset=float(kfields[4]),
            smoothness=float(kfields[5]),
        )
        method = reader.next_fields()[1]
        _, anchors = reader.read_matrix("anchors")
        _, weights = reader.read_matrix("weights")
    return KernelEstimator(
        anchors=anchors, weights=weights, kernel=spec, method=method
    )


def write_results(rows, path, reference=None):
    """Result table as CSV; reference adds a reference_<metric> annotation column."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [
            "method",
            "pilot_size",
            "metric_name",
            "metric_value",
            "train_time_s",
            "episodes_ok",
        ]
        if reference:
            header.append("reference_mse")
        writer.writerow(header)
        for row in rows:
            record = [
                row.method,
                row.pilot_size,
                row.metric_name,
                repr(row.metric_value),
                repr(row.train_time_s),
                row.episodes_ok,
            ]
            if reference:
                ref = reference.get((row.method, row.pilot_size))
                record.append("" if ref is None else repr(ref))
            writer.writerow(record)


def read_results(path):
    rows = []
    with open(path, newline="") as fh:
        for record in csv.DictReader(fh):
            rows.append(
                ResultRow(
                    method=record["method"],
                    pilot_size=int(record["pilot_size"]),
                    metric_name=record["metric_name"],
                    metric_value=float(record["metric_value"]),
                    train_time_s=float(record["train_time_s"]),
                    episodes_ok=int(record["episodes_ok"]),
                )
            )
    return rows


def write_plot_script(rows, csv_name, path):
    """Emit a gnuplot script drawing metric vs pilot size, one curve per method."""
    methods = sorted({row.method for row in rows})
    metric = rows[0].metric_name if rows else "mse"
    with open(path, "w") as fh:
        fh.write("set datafile separator ','\n")
        fh.write("set key outside\n")
        fh.write("set logscale y\n")
        fh.write("set xlabel 'pilot size'\n")
        fh.write(f"set ylabel '{metric}'\n")
        parts = [
            f"'{csv_name}' using 2:(strcol(1) eq '{m}' ? column(4) : NaN) "
            f"with linespoints title '{m}'"
            for m in methods
        ]
        fh.write("plot \\\n    " + ", \\\n    ".join(parts) + "\n")
