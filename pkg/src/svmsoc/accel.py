"""Numeric model of the streaming classifier datapath.

The accelerator computes, entirely in binary32 with round-to-nearest-even
after every multiply and every add:

1. a weight vector AC[f] accumulated over support vectors in ascending
   index order (AC[f] += alpha_y[s] * sv[s][f]),
2. a running dot product D accumulated over features in ascending order
   (D += AC[f] * x[f]),
3. the decision distance D - b and its sign: label +1 when the distance
   is >= the threshold, else -1.

No fused multiply-add and no reassociation anywhere: each product is
rounded before the add that consumes it.  Overflow follows IEEE-754
(round to +/-inf); NaN compares false against the threshold, so a NaN
distance yields label -1 and a cleared finite flag.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .model_io import StreamFrame, TestInstance, TrainedModel, split_frame

__all__ = [
    "AccelResult",
    "WeightAccumulator",
    "accumulate_weight_vector",
    "dot_distance",
    "decide",
    "run_accelerator",
    "f32_bits",
]

_F32 = np.float32


def f32_bits(value) -> int:
    """The binary32 bit pattern of a value, as an unsigned int."""
    v = float(value)
    try:
        return struct.unpack("<I", struct.pack("<f", v))[0]
    except OverflowError:
        # struct refuses finite doubles beyond the binary32 range; they
        # round to the matching infinity
        return struct.unpack("<I", struct.pack("<f", math.copysign(math.inf, v)))[0]


@dataclass(frozen=True)
class WeightAccumulator:
    """The condensed weight vector AC, one binary32 per feature."""

    values: np.ndarray

    @property
    def feature_count(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class AccelResult:
    """Outcome of one classification.

    distance is D - b and raw_distance is D, both exactly representable
    in binary32.  finite is False when the distance overflowed or went
    NaN on the way through the pipeline.
    """

    label: int
    distance: float
    raw_distance: float
    finite: bool


def _accumulate(sv: np.ndarray, alpha_y: np.ndarray) -> np.ndarray:
    ac = np.zeros(sv.shape[1], dtype=_F32)
    with np.errstate(all="ignore"):
        for s in range(sv.shape[0]):
            ac = ac + alpha_y[s] * sv[s]
    return ac


def _dot(ac: np.ndarray, x: np.ndarray) -> np.float32:
    d = _F32(0.0)
    with np.errstate(all="ignore"):
        for f in range(ac.shape[0]):
            d = d + ac[f] * x[f]
    return d


def accumulate_weight_vector(model: TrainedModel) -> WeightAccumulator:
    """Condense the model into AC[f] = sum_s alpha_y[s] * sv[s][f].

    Accumulation order is support vectors ascending, one rounding per
    multiply and per add, independently per feature lane.
    """
    values = _accumulate(model.support_vectors, model.alpha_y)
    values.flags.writeable = False
    return WeightAccumulator(values)


def dot_distance(acc: WeightAccumulator, test: TestInstance) -> np.float32:
    """Running binary32 dot product of AC with the test vector, feature 0 first."""
    if acc.feature_count != test.feature_count:
        raise DimensionError(
            f"accumulator has {acc.feature_count} features, instance has"
            f" {test.feature_count}"
        )
    return _dot(acc.values, test.values)


def decide(raw_distance, bias, threshold=0.0) -> tuple[int, np.float32]:
    """Subtract the bias in binary32 and compare against the threshold.

    Returns (label, distance) with label +1 iff distance >= threshold
    under an IEEE binary32 compare, so a NaN distance labels -1.
    """
    with np.errstate(all="ignore"):
        distance = _F32(raw_distance) - _F32(bias)
    label = 1 if distance >= _F32(threshold) else -1
    return label, distance


def run_accelerator(
    frame: StreamFrame, sv_count: int, feature_count: int, threshold: float = 0.0
) -> AccelResult:
    """Consume one stream frame exactly as the hardware does.

    The frame is sliced, not validated: non-finite word patterns flow
    through the arithmetic and surface in the result flags.
    """
    sv, bias, alpha_y, x = split_frame(frame, sv_count, feature_count)
    ac = _accumulate(sv, alpha_y)
    raw = _dot(ac, x)
    label, distance = decide(raw, bias, threshold)
    return AccelResult(
        label=label,
        distance=float(distance),
        raw_distance=float(raw),
        finite=bool(np.isfinite(distance)),
    )
