import numpy as np
import pytest

from symstory.models import ModelHyper, SequenceModel, motion2action_step
from symstory.motion import Frame, Pose
from symstory.neural import load_checkpoint, save_checkpoint


def _frame(t, vals):
    return Frame(poses=(Pose(vals[0], vals[1], vals[2]), Pose(vals[3], vals[4], vals[5])), t=t)


def test_roundtrip_bit_identical_forward(tmp_path):
    hyper = ModelHyper(kind="motion2action", hidden=12, layers=2, ff_hidden=10, embed_dim=7)
    model = SequenceModel(hyper, seed=99)
    path = tmp_path / "m2a.ckpt.json"
    save_checkpoint(path, model.to_checkpoint({"epoch": 3, "test_loss": 0.25}))
    loaded = SequenceModel.from_checkpoint(load_checkpoint(path))

    rng = np.random.default_rng(5)
    frames = [
        _frame(t, rng.uniform(0, 1, size=6).tolist()) for t in range(6)
    ]
    s1, s2 = model.fresh_state(), loaded.fresh_state()
    prev = None
    for f in frames:
        e1, s1 = motion2action_step(model, s1, f, prev)
        e2, s2 = motion2action_step(loaded, s2, f, prev)
        assert np.array_equal(e1.vector, e2.vector)  # bitwise
        prev = f


def test_parameters_roundtrip_exact(tmp_path):
    hyper = ModelHyper(kind="reactive", hidden=6, layers=3, ff_hidden=5, embed_dim=4)
    model = SequenceModel(hyper, seed=1)
    path = tmp_path / "re.ckpt.json"
    save_checkpoint(path, model.to_checkpoint())
    ckpt = load_checkpoint(path)
    assert ckpt.kind == "reactive"
    for name, arr in model.parameters().items():
        assert np.array_equal(ckpt.params[name], arr)


def test_metadata_preserved(tmp_path):
    hyper = ModelHyper(kind="proactive", hidden=4, layers=1, ff_hidden=4, embed_dim=3)
    model = SequenceModel(hyper, seed=0)
    meta = {"epoch": 17, "test_loss": 0.125, "seed": 4}
    path = tmp_path / "pro.ckpt.json"
    save_checkpoint(path, model.to_checkpoint(meta))
    ckpt = load_checkpoint(path)
    assert ckpt.meta["epoch"] == 17
    assert ckpt.meta["test_loss"] == 0.125
    assert ckpt.hyper == hyper.to_dict()


def test_rejects_foreign_files(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text('{"format": "something-else", "version": 1}')
    with pytest.raises(ValueError):
        load_checkpoint(path)


def test_kind_mismatch_raises():
    hyper = ModelHyper(kind="proactive", hidden=4, layers=1, ff_hidden=4, embed_dim=3)
    model = SequenceModel(hyper, seed=0)
    with pytest.raises(ValueError):
        model.expect_kind("motion2action")
