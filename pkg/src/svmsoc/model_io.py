"""Model, instance, and stream-frame types plus all text/binary parsers.

On-disk formats handled here:

* SVM-Light model files, linear kernel only: an 11-line header followed by
  one sparse support-vector line per SV.
* A three-file plain-text form: the support vectors as an S x Fl matrix
  ("svs" text), the bias followed by the S alpha*y weights ("alpha" text),
  and a bare Fl-vector ("test" text).
* Labeled CSV: Fl feature columns then a +/-1 label column.
* The accelerator stream frame: S*Fl + 1 + S + Fl little-endian binary32
  words in transfer order (support vectors row-major, then bias, then
  alpha*y weights, then the test vector).

Every stored real is binary32.  Parsers round decimal text to the nearest
binary32 once; emitters print the shortest decimal that parses back to the
same binary32, so emit/parse round-trips are bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    FrameLengthError,
    MalformedDataset,
    MalformedInstance,
    MalformedModel,
    UnsupportedKernel,
)

__all__ = [
    "TrainedModel",
    "TestInstance",
    "LabeledDataset",
    "StreamFrame",
    "parse_svmlight_model",
    "parse_native_model",
    "parse_test_instance",
    "load_dataset",
    "emit_native_model",
    "emit_test_instance",
    "emit_dataset",
    "emit_stream",
    "parse_stream",
    "make_synthetic",
    "format_real",
]

_F32 = np.float32


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=_F32, order="C", copy=True)
    out.flags.writeable = False
    return out


def format_real(value) -> str:
    """Shortest decimal string that parses back to the same binary32."""
    v = _F32(value)
    if np.isnan(v):
        return "nan"
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return np.format_float_positional(v, unique=True, trim="0")


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """A trained linear SVM in the dense form the accelerator consumes.

    support_vectors is S x Fl binary32, alpha_y holds the S per-vector
    alpha*label weights, and bias is the trained threshold term b.  The
    decision threshold (default 0) is compared against the distance
    after b has been subtracted.  All stored reals are finite binary32.
    """

    support_vectors: np.ndarray
    alpha_y: np.ndarray
    bias: float
    threshold: float = 0.0

    def __post_init__(self):
        sv = _freeze(np.atleast_2d(self.support_vectors))
        ay = _freeze(np.atleast_1d(self.alpha_y))
        if sv.ndim != 2 or ay.ndim != 1:
            raise MalformedModel("support vectors must be 2-D and weights 1-D")
        if sv.shape[0] < 1 or sv.shape[1] < 1:
            raise MalformedModel("need at least one support vector and one feature")
        if sv.shape[0] != ay.shape[0]:
            raise MalformedModel(
                f"{sv.shape[0]} support vectors but {ay.shape[0]} alpha*y weights"
            )
        if not np.isfinite(sv).all() or not np.isfinite(ay).all():
            raise MalformedModel("non-finite value in model payload")
        b = float(_F32(self.bias))
        th = float(_F32(self.threshold))
        if not np.isfinite(b) or not np.isfinite(th):
            raise MalformedModel("bias and threshold must be finite")
        object.__setattr__(self, "support_vectors", sv)
        object.__setattr__(self, "alpha_y", ay)
        object.__setattr__(self, "bias", b)
        object.__setattr__(self, "threshold", th)

    @property
    def sv_count(self) -> int:
        return self.support_vectors.shape[0]

    @property
    def feature_count(self) -> int:
        return self.support_vectors.shape[1]

    def __eq__(self, other):
        if not isinstance(other, TrainedModel):
            return NotImplemented
        return (
            self.support_vectors.shape == other.support_vectors.shape
            and np.array_equal(
                self.support_vectors.view(np.uint32),
                other.support_vectors.view(np.uint32),
            )
            and np.array_equal(
                self.alpha_y.view(np.uint32), other.alpha_y.view(np.uint32)
            )
            and self.bias == other.bias
            and self.threshold == other.threshold
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class TestInstance:
    """One Fl-feature query vector, finite binary32."""

    __test__ = False  # not a pytest class, despite the name

    values: np.ndarray

    def __post_init__(self):
        vals = _freeze(np.atleast_1d(self.values))
        if vals.ndim != 1 or vals.shape[0] < 1:
            raise MalformedInstance("test instance must be a non-empty vector")
        if not np.isfinite(vals).all():
            raise MalformedInstance("non-finite value in test instance")
        object.__setattr__(self, "values", vals)

    @property
    def feature_count(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other):
        if not isinstance(other, TestInstance):
            return NotImplemented
        return self.values.shape == other.values.shape and np.array_equal(
            self.values.view(np.uint32), other.values.view(np.uint32)
        )

    __hash__ = None


@dataclass(frozen=True)
class LabeledDataset:
    """Instances plus ground-truth labels, each +1 or -1."""

    instances: tuple[TestInstance, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.instances) != len(self.labels):
            raise MalformedDataset("instance/label count mismatch")
        if len(self.instances) == 0:
            raise MalformedDataset("dataset is empty")
        if any(l not in (1, -1) for l in self.labels):
            raise MalformedDataset("labels must be +1 or -1")
        widths = {inst.feature_count for inst in self.instances}
        if len(widths) != 1:
            raise MalformedDataset("rows disagree on feature count")

    @property
    def feature_count(self) -> int:
        return self.instances[0].feature_count

    def __len__(self) -> int:
        return len(self.instances)


@dataclass(frozen=True, eq=False)
class StreamFrame:
    """The word stream a host sends for one classification.

    Exactly S*Fl + 1 + S + Fl 32-bit words: support vectors row-major,
    bias, alpha*y weights, test vector, each word the little-endian bit
    pattern of a binary32.
    """

    words: np.ndarray

    def __post_init__(self):
        w = np.array(self.words, dtype="<u4", copy=True)
        if w.ndim != 1:
            w = w.reshape(-1).copy()
        w.flags.writeable = False
        object.__setattr__(self, "words", w)

    @staticmethod
    def word_count(sv_count: int, feature_count: int) -> int:
        return sv_count * feature_count + 1 + sv_count + feature_count

    def __len__(self) -> int:
        return int(self.words.shape[0])

    def __eq__(self, other):
        if not isinstance(other, StreamFrame):
            return NotImplemented
        return np.array_equal(self.words, other.words)

    __hash__ = None

    def to_bytes(self) -> bytes:
        return self.words.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "StreamFrame":
        if len(data) % 4 != 0:
            raise FrameLengthError(expected=(len(data) // 4 + 1) * 4, actual=len(data))
        return cls(np.frombuffer(data, dtype="<u4"))


# --------------------------------------------------------------------------
# text parsing helpers

def _parse_real(token: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ValueError(f"bad real {token!r}") from None


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


# SVM-Light header layout: one value per line, in this order.
_HEADER_FIELDS = (
    "version banner",        # line 1, free text
    "kernel type",           # line 2
    "kernel degree",         # line 3
    "rbf gamma",             # line 4
    "poly coefficient s",    # line 5
    "poly coefficient r",    # line 6
    "kernel argument u",     # line 7, may be empty
    "highest feature index", # line 8
    "training document count",  # line 9
    "support vector count plus one",  # line 10
    "threshold b",           # line 11
)


def parse_svmlight_model(text: str) -> TrainedModel:
    """Parse the linear-kernel subset of the SVM-Light model format.

    Sparse idx:val pairs use 1-based feature indices and densify with
    zeros.  Any kernel type other than 0 raises UnsupportedKernel.
    """
    lines = text.splitlines()
    if len(lines) < len(_HEADER_FIELDS):
        raise MalformedModel(
            f"expected at least {len(_HEADER_FIELDS)} header lines, got {len(lines)}"
        )

    def header_value(idx: int) -> str:
        return _strip_comment(lines[idx]).strip()

    def header_int(idx: int) -> int:
        tok = header_value(idx)
        try:
            return int(tok)
        except ValueError:
            raise MalformedModel(
                f"bad {_HEADER_FIELDS[idx]} {tok!r}", line=idx + 1
            ) from None

    kernel = header_int(1)
    if kernel != 0:
        raise UnsupportedKernel(
            f"unsupported kernel type {kernel} (only linear, type 0)"
        )
    feature_count = header_int(7)
    if feature_count < 1:
        raise MalformedModel("highest feature index must be >= 1", line=8)
    sv_plus_one = header_int(9)
    sv_count = sv_plus_one - 1
    if sv_count < 1:
        raise MalformedModel("support vector count must be >= 1", line=10)
    try:
        bias = _parse_real(header_value(10))
    except ValueError as exc:
        raise MalformedModel(str(exc), line=11) from None
    if not np.isfinite(bias):
        raise MalformedModel("threshold must be finite", line=11)

    sv = np.zeros((sv_count, feature_count), dtype=_F32)
    alpha_y = np.zeros(sv_count, dtype=_F32)
    row = 0
    for lineno0 in range(len(_HEADER_FIELDS), len(lines)):
        tokens = _strip_comment(lines[lineno0]).split()
        if not tokens:
            continue
        lineno = lineno0 + 1
        if row >= sv_count:
            raise MalformedModel(
                f"more than the declared {sv_count} support vector lines", line=lineno
            )
        try:
            weight = _parse_real(tokens[0])
        except ValueError as exc:
            raise MalformedModel(str(exc), line=lineno) from None
        if not np.isfinite(weight):
            raise MalformedModel("non-finite alpha*y weight", line=lineno)
        alpha_y[row] = _F32(weight)
        seen: set[int] = set()
        for pair in tokens[1:]:
            idx_s, sep, val_s = pair.partition(":")
            if not sep:
                raise MalformedModel(f"expected idx:val pair, got {pair!r}", line=lineno)
            try:
                idx = int(idx_s)
            except ValueError:
                raise MalformedModel(f"bad feature index {idx_s!r}", line=lineno) from None
            if not 1 <= idx <= feature_count:
                raise MalformedModel(
                    f"feature index {idx} outside 1..{feature_count}", line=lineno
                )
            if idx in seen:
                raise MalformedModel(f"duplicate feature index {idx}", line=lineno)
            seen.add(idx)
            try:
                val = _parse_real(val_s)
            except ValueError as exc:
                raise MalformedModel(str(exc), line=lineno) from None
            if not np.isfinite(val):
                raise MalformedModel("non-finite feature value", line=lineno)
            sv[row, idx - 1] = _F32(val)
        row += 1
    if row != sv_count:
        raise MalformedModel(f"declared {sv_count} support vectors, found {row}")
    return TrainedModel(sv, alpha_y, bias)


def _parse_real_lines(text: str, err_cls, what: str):
    """Yield (lineno, [floats]) for every non-blank line, finiteness-checked."""
    for lineno0, line in enumerate(text.splitlines()):
        tokens = line.split()
        if not tokens:
            continue
        vals = []
        for tok in tokens:
            try:
                vals.append(_parse_real(tok))
            except ValueError as exc:
                if err_cls is MalformedModel:
                    raise MalformedModel(f"{what}: {exc}", line=lineno0 + 1) from None
                raise err_cls(f"{what} line {lineno0 + 1}: {exc}") from None
        if not all(np.isfinite(v) for v in vals):
            if err_cls is MalformedModel:
                raise MalformedModel(f"{what}: non-finite value", line=lineno0 + 1)
            raise err_cls(f"{what} line {lineno0 + 1}: non-finite value")
        yield lineno0 + 1, vals


def parse_native_model(svs_text: str, alpha_text: str) -> TrainedModel:
    """Parse the two-file plain-text form.

    svs_text holds S rows of Fl reals; alpha_text holds 1+S reals, the
    bias first and then the S alpha*y weights.
    """
    rows = []
    width = None
    for lineno, vals in _parse_real_lines(svs_text, MalformedModel, "support vectors"):
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise MalformedModel(
                f"support vectors: expected {width} values, got {len(vals)}", line=lineno
            )
        rows.append(vals)
    if not rows:
        raise MalformedModel("support vectors: no rows")

    weights: list[float] = []
    for _lineno, vals in _parse_real_lines(alpha_text, MalformedModel, "weights"):
        weights.extend(vals)
    if len(weights) != len(rows) + 1:
        raise MalformedModel(
            f"weights: expected bias plus {len(rows)} alpha*y values, got {len(weights)}"
        )
    sv = np.array(rows, dtype=_F32)
    return TrainedModel(sv, np.array(weights[1:], dtype=_F32), weights[0])


def parse_test_instance(text: str, feature_count: int | None = None) -> TestInstance:
    """Parse whitespace-separated reals into a TestInstance."""
    vals: list[float] = []
    for lineno, line_vals in _parse_real_lines(text, MalformedInstance, "test instance"):
        vals.extend(line_vals)
    if not vals:
        raise MalformedInstance("test instance: no values")
    if feature_count is not None and len(vals) != feature_count:
        raise MalformedInstance(
            f"test instance has {len(vals)} values, model expects {feature_count}"
        )
    return TestInstance(np.array(vals, dtype=_F32))


def load_dataset(text: str) -> LabeledDataset:
    """Parse labeled CSV: Fl feature columns then a +1/-1 label column."""
    instances = []
    labels = []
    width = None
    for lineno0, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        lineno = lineno0 + 1
        cells = [c.strip() for c in line.split(",")]
        if len(cells) < 2:
            raise MalformedDataset(f"line {lineno}: need features plus a label column")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise MalformedDataset(
                f"line {lineno}: expected {width} columns, got {len(cells)}"
            )
        try:
            vals = [_parse_real(c) for c in cells[:-1]]
            raw_label = _parse_real(cells[-1])
        except ValueError as exc:
            raise MalformedDataset(f"line {lineno}: {exc}") from None
        if not all(np.isfinite(v) for v in vals):
            raise MalformedDataset(f"line {lineno}: non-finite feature value")
        if raw_label not in (1.0, -1.0):
            raise MalformedDataset(f"line {lineno}: label must be +1 or -1")
        instances.append(TestInstance(np.array(vals, dtype=_F32)))
        labels.append(int(raw_label))
    if not instances:
        raise MalformedDataset("dataset is empty")
    return LabeledDataset(tuple(instances), tuple(labels))


# --------------------------------------------------------------------------
# emitters (inverse of the parsers above; SVM-Light emission is not needed)

def emit_native_model(model: TrainedModel) -> tuple[str, str]:
    """Render (svs_text, alpha_text) such that parse_native_model round-trips."""
    svs_text = "".join(
        " ".join(format_real(v) for v in row) + "\n" for row in model.support_vectors
    )
    alpha_lines = [format_real(model.bias)]
    alpha_lines.extend(format_real(v) for v in model.alpha_y)
    return svs_text, "\n".join(alpha_lines) + "\n"


def emit_test_instance(instance: TestInstance) -> str:
    return " ".join(format_real(v) for v in instance.values) + "\n"


def emit_dataset(dataset: LabeledDataset) -> str:
    lines = []
    for inst, label in zip(dataset.instances, dataset.labels):
        cells = [format_real(v) for v in inst.values]
        cells.append(f"{label:d}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# stream frames

def emit_stream(model: TrainedModel, test: TestInstance) -> StreamFrame:
    """Serialize one classification request into transfer order."""
    if test.feature_count != model.feature_count:
        raise DimensionError(
            f"model has {model.feature_count} features, instance has {test.feature_count}"
        )
    payload = np.concatenate(
        [
            model.support_vectors.reshape(-1),
            np.array([model.bias], dtype=_F32),
            model.alpha_y,
            test.values,
        ]
    ).astype("<f4")
    return StreamFrame(payload.view("<u4"))


def split_frame(frame: StreamFrame, sv_count: int, feature_count: int):
    """Slice a frame into (sv_matrix, bias, alpha_y, test) binary32 views.

    Length is validated; word contents are not, so non-finite bit patterns
    pass through untouched (the accelerator model propagates them).
    """
    expected = StreamFrame.word_count(sv_count, feature_count)
    if len(frame) != expected:
        raise FrameLengthError(expected=expected, actual=len(frame))
    reals = frame.words.view("<f4")
    n_sv = sv_count * feature_count
    sv = reals[:n_sv].reshape(sv_count, feature_count)
    bias = reals[n_sv]
    alpha_y = reals[n_sv + 1 : n_sv + 1 + sv_count]
    test = reals[n_sv + 1 + sv_count :]
    return sv, bias, alpha_y, test


def parse_stream(
    frame: StreamFrame, sv_count: int, feature_count: int
) -> tuple[TrainedModel, TestInstance]:
    """Decode a frame back into validated model and instance objects.

    The frame does not carry the decision threshold, so the returned
    model has the default threshold 0.
    """
    sv, bias, alpha_y, test = split_frame(frame, sv_count, feature_count)
    return TrainedModel(sv, alpha_y, float(bias)), TestInstance(test)


# --------------------------------------------------------------------------
# synthetic fixtures

def make_synthetic(
    sv_count: int, feature_count: int, seed: int, instances: int = 32
) -> tuple[TrainedModel, LabeledDataset]:
    """Deterministically generate a model plus a dataset it classifies 100%.

    All reals are drawn uniform in [-1, 1] (bias in [-1/2, 1/2]).  Test
    vectors are rejection-sampled until the double-precision decision
    value clears both a relative margin of 1e-3 and twice the worst-case
    binary32 accumulation error bound, so the binary32 pipeline provably
    assigns every generated label correctly.
    """
    if sv_count < 1 or feature_count < 1 or instances < 1:
        raise ValueError("sv_count, feature_count, and instances must be >= 1")
    rng = np.random.default_rng(seed)
    # u = half the binary32 epsilon; gamma_n ~ n*u bounds n chained roundings
    unit = float(np.finfo(np.float32).eps) / 2.0
    gamma = (sv_count + feature_count + 2) * unit

    for _model_attempt in range(64):
        sv = rng.uniform(-1.0, 1.0, (sv_count, feature_count)).astype(_F32)
        ay = rng.uniform(-1.0, 1.0, sv_count).astype(_F32)
        bias = float(_F32(rng.uniform(-0.5, 0.5)))
        w = sv.astype(np.float64).T @ ay.astype(np.float64)
        abs_col = np.abs(sv.astype(np.float64)).T @ np.abs(ay.astype(np.float64))

        picked: list[np.ndarray] = []
        labels: list[int] = []
        tries = 0
        while len(picked) < instances and tries < 200 * instances:
            tries += 1
            x = rng.uniform(-1.0, 1.0, feature_count).astype(_F32)
            x64 = x.astype(np.float64)
            d = float(w @ x64 - bias)
            scale = float(abs_col @ np.abs(x64)) + abs(bias)
            margin = max(1e-3 * (1.0 + abs(d)), 2.0 * gamma * scale)
            if abs(d) >= margin:
                picked.append(x)
                labels.append(1 if d >= 0.0 else -1)
        if len(picked) == instances:
            model = TrainedModel(sv, ay, bias)
            dataset = LabeledDataset(
                tuple(TestInstance(x) for x in picked), tuple(labels)
            )
            return model, dataset
    raise RuntimeError(
        f"could not find separable fixtures for S={sv_count}, Fl={feature_count}"
    )
