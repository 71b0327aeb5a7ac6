import numpy as np
import pytest

from fedscore.core import Dataset, LabelSpace
from fedscore.data import Standardizer, load_csv_dataset, pools_from_dataset, write_csv_dataset
from fedscore.errors import ParseError, UnknownLabel

SPACE = LabelSpace(("x", "y", "z"))


def _write(tmp_path, text: str) -> str:
    path = tmp_path / "data.csv"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_load_csv_dataset(tmp_path):
    path = _write(tmp_path, "label,f0,f1\nx,1.5,2\nz,-0.25,1e3\n")
    dataset = load_csv_dataset(path, SPACE)
    assert dataset.label_names() == ("x", "z")
    assert dataset.features.tolist() == [[1.5, 2.0], [-0.25, 1000.0]]


def test_written_csv_reads_back(tmp_path):
    rng = np.random.default_rng(0)
    dataset = Dataset(rng.normal(size=(5, 3)), [2, 0, 1, 1, 0], SPACE)
    path = str(tmp_path / "out" / "pools.csv")
    write_csv_dataset(path, dataset)
    loaded = load_csv_dataset(path, SPACE)
    assert np.array_equal(loaded.features, dataset.features)
    assert np.array_equal(loaded.labels, dataset.labels)
    with open(path, "rb") as handle:
        assert b"\r\n" not in handle.read()


@pytest.mark.parametrize("text, line", [
    ("", 1),
    ("label,g0\nx,1\n", 1),
    ("label,f0,f1\nx,1\n", 2),
    ("label,f0\nx,1\ny,abc\n", 3),
    ("label,f0\nx,nan\n", 2),
])
def test_load_csv_dataset_parse_errors(tmp_path, text, line):
    with pytest.raises(ParseError) as excinfo:
        load_csv_dataset(_write(tmp_path, text), SPACE)
    assert excinfo.value.line == line


def test_load_csv_dataset_unknown_label(tmp_path):
    with pytest.raises(UnknownLabel):
        load_csv_dataset(_write(tmp_path, "label,f0\nw,1\n"), SPACE)


def test_pools_from_dataset_groups_by_label():
    dataset = Dataset(np.arange(5.0).reshape(5, 1), [1, 0, 1, 1, 0], SPACE)
    pools = pools_from_dataset(dataset)
    assert pools.features["y"].ravel().tolist() == [0.0, 2.0, 3.0]
    assert pools.size("z") == 0
    assert pools.total_rows() == 5


def test_standardizer_uses_public_statistics():
    rng = np.random.default_rng(1)
    features = rng.normal(5.0, 3.0, size=(200, 2))
    features[:, 1] = 4.0
    public = Dataset(features, np.zeros(200, dtype=np.int64), SPACE)
    scaler = Standardizer.fit(public)
    scaled = scaler.apply(public)
    assert np.allclose(scaled.features[:, 0].mean(), 0.0, atol=1e-12)
    assert np.isclose(scaled.features[:, 0].std(), 1.0)
    # a constant column is centred, not divided by zero
    assert np.all(scaled.features[:, 1] == 0.0)

    pools = scaler.apply_pools(pools_from_dataset(public))
    assert np.array_equal(pools.features["x"], scaled.features)
