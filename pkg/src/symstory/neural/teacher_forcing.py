"""Modified teacher forcing for the motion generators.

During training, the distance features for the observed character are
measured against where the model *put* the generated character (its previous
ground-truth position advanced by its own generated delta) instead of the
generated character's ground-truth position. Deltas and rotations stay pure
ground truth. The fed-back generated deltas are data, not graph nodes:
gradients do not flow through them.
"""
from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from ..motion import Frame, KinematicFeatures, delta, pair_distance


def teacher_forced_distance(
    gt_self_t: Tuple[float, float],
    gt_other_prev: Tuple[float, float],
    generated_delta_other_t: Tuple[float, float],
) -> Tuple[float, float]:
    """Distance of the observed character to the generated character's
    predicted position: gt_self_t - (gt_other_prev + generated_delta)."""
    return (
        gt_self_t[0] - (gt_other_prev[0] + generated_delta_other_t[0]),
        gt_self_t[1] - (gt_other_prev[1] + generated_delta_other_t[1]),
    )


def step_features(
    frame_t: Frame,
    frame_prev: Optional[Frame],
    observed_char: int,
    generated_delta_t: Optional[Tuple[float, float]],
) -> KinematicFeatures:
    """Training-time feature vector for one frame.

    observed_char is the character whose motion feeds the LSTM (1 for the
    sym0 generator, 0 for the sym1 generator); the other character is the
    one being generated. At the first frame of a segment both the delta and
    the feedback are undefined, so features fall back to pure ground truth
    with zero deltas.
    """
    if observed_char not in (0, 1):
        raise ValueError("observed_char must be 0 or 1")
    generated_char = 1 - observed_char
    p_obs = frame_t.poses[observed_char]
    p_gen = frame_t.poses[generated_char]
    if frame_prev is None:
        dx, dy = 0.0, 0.0
        xdist, ydist = pair_distance(p_obs, p_gen)
    else:
        if generated_delta_t is None:
            raise ValueError(f"missing generated output for frame {frame_t.t}")
        dx, dy = delta(p_obs, frame_prev.poses[observed_char])
        prev_gen = frame_prev.poses[generated_char]
        xdist, ydist = teacher_forced_distance(
            (p_obs.x, p_obs.y), (prev_gen.x, prev_gen.y), generated_delta_t
        )
    p0, p1 = frame_t.poses
    return KinematicFeatures(dx, dy, xdist, ydist, p0.r, p1.r)


def teacher_forcing_features(
    frames: Sequence[Frame],
    observed_char: int,
    generated_deltas: Sequence[Optional[Tuple[float, float]]],
) -> List[KinematicFeatures]:
    """Assemble training inputs for a whole ground-truth sequence.

    generated_deltas[t] is the generated (dx, dy) of the generated character
    for frame t (produced at step t-1); index 0 is ignored and may be None.
    """
    if len(generated_deltas) < len(frames):
        raise ValueError(
            f"need a generated delta per frame: {len(generated_deltas)} < {len(frames)}"
        )
    out = []
    prev = None
    for t, frame in enumerate(frames):
        out.append(step_features(frame, prev, observed_char, generated_deltas[t] if t > 0 else None))
        prev = frame
    return out
