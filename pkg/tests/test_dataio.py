import json

import numpy as np
import pytest

from conftest import two_template_problem
from tsnmf.core import factorize
from tsnmf.dataio import (
    Dataset,
    RunManifest,
    emit_scatter,
    file_digest,
    load_delimited,
    preprocess_ionosphere,
    read_matrix,
    read_trace,
    write_dataset,
    write_matrix,
    write_result,
)
from tsnmf.errors import EmptyFile, ParseError, RaggedRows, SchemaMismatch, WrongK
from tsnmf.search import SearchConfig

# golden values from one audited pass of the preprocessing rule over the file
IONO_ROWS = 351
IONO_FIRST_ZERO = 38
IONO_RETAINED = 313


@pytest.fixture(scope="module")
def iono_raw(ionosphere_path):
    return load_delimited(ionosphere_path, label_column=-1)


class TestLoad:
    def test_identity(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("1,0\n0,1\n")
        ds = load_delimited(p)
        np.testing.assert_array_equal(ds.matrix, np.eye(2))
        assert ds.labels is None
        assert ds.provenance["input_sha256"] == file_digest(p)

    def test_rows_become_columns(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("1,2,3\n4,5,6\n")
        np.testing.assert_array_equal(load_delimited(p).matrix, [[1, 4], [2, 5], [3, 6]])
        np.testing.assert_array_equal(load_delimited(p, orientation="columns").matrix,
                                      [[1, 2, 3], [4, 5, 6]])

    def test_header_label_delimiter(self, tmp_path):
        p = tmp_path / "x.tsv"
        p.write_text("a\tb\tcls\n1\t2\tg\n\n3\t4\tb\n")
        ds = load_delimited(p, delimiter="\t", has_header=True, label_column=2)
        np.testing.assert_array_equal(ds.matrix, [[1, 3], [2, 4]])
        assert ds.labels == ["g", "b"]

    def test_parse_error_location(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("1,2\n3,abc\n")
        with pytest.raises(ParseError) as info:
            load_delimited(p)
        assert (info.value.row, info.value.col) == (2, 2)

    def test_ragged(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("1,2\n3\n")
        with pytest.raises(RaggedRows):
            load_delimited(p)

    def test_empty(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("\n\n")
        with pytest.raises(EmptyFile):
            load_delimited(p)

    def test_label_count_checked(self):
        with pytest.raises(ValueError):
            Dataset(np.eye(2), ["a"])

    def test_ionosphere_shape(self, iono_raw):
        assert iono_raw.matrix.shape == (34, IONO_ROWS)
        assert set(iono_raw.labels) == {"g", "b"}


class TestIonosphere:
    def test_preprocess(self, iono_raw):
        ds = preprocess_ionosphere(iono_raw)
        assert ds.matrix.shape == (32, IONO_RETAINED)
        assert len(ds.labels) == IONO_RETAINED
        np.testing.assert_allclose(np.linalg.norm(ds.matrix, axis=0), 1, atol=1e-12)
        steps = ds.provenance["steps"]
        assert steps[0]["dropped"] == IONO_FIRST_ZERO
        assert steps[1]["dropped"] == [1, 2]
        assert steps[2]["points"] == IONO_RETAINED

    def test_dropped_rows_are_all_bad(self, iono_raw):
        zero = iono_raw.matrix[0] == 0
        assert {lab for lab, z in zip(iono_raw.labels, zero) if z} == {"b"}

    def test_idempotent(self, iono_raw):
        ds = preprocess_ionosphere(iono_raw)
        again = preprocess_ionosphere(ds, check_schema=False)
        assert again.matrix.shape == ds.matrix.shape
        assert np.max(np.abs(again.matrix - ds.matrix)) <= 1e-15
        assert again.labels == ds.labels

    def test_schema_mismatch(self, iono_raw):
        with pytest.raises(SchemaMismatch):
            preprocess_ionosphere(Dataset(iono_raw.matrix[:33], iono_raw.labels))
        with pytest.raises(SchemaMismatch):
            preprocess_ionosphere(Dataset(iono_raw.matrix, None))
        bad = iono_raw.matrix.copy()
        bad[1, 0] = 0.5
        with pytest.raises(SchemaMismatch):
            preprocess_ionosphere(Dataset(bad, iono_raw.labels))

    def test_write_and_reload(self, iono_raw, tmp_path):
        ds = preprocess_ionosphere(iono_raw)
        write_dataset(ds, tmp_path / "iono.csv")
        back = load_delimited(tmp_path / "iono.csv", label_column=-1)
        np.testing.assert_array_equal(back.matrix, ds.matrix)
        assert back.labels == ds.labels


class TestResults:
    def test_matrix_roundtrip(self, rng, tmp_path):
        M = rng.normal(size=(4, 7)) * 10.0 ** rng.integers(-300, 300, size=(4, 7))
        write_matrix(tmp_path / "m.csv", M)
        np.testing.assert_array_equal(read_matrix(tmp_path / "m.csv"), M)

    def test_write_result(self, tmp_path):
        X, _, _ = two_template_problem(0)
        res = factorize(X, SearchConfig(epsilon=1.0, i_max=10, seed=1), 2)
        labels = [f"p{j}" for j in range(X.shape[1])]
        man = write_result(res, tmp_path, labels=labels, provenance={"source": "synthetic"})
        np.testing.assert_array_equal(read_matrix(tmp_path / "W.csv"), res.W)
        np.testing.assert_array_equal(read_matrix(tmp_path / "H.csv"), res.H)
        trace = read_trace(tmp_path / "trace.csv")
        assert [t["fit"] for t in trace] == [r.fit for r in res.trace]
        assert [t["step"] for t in trace] == [r.step for r in res.trace]
        for name, digest in man.digests.items():
            assert file_digest(tmp_path / name) == digest
        on_disk = json.loads((tmp_path / "manifest.json").read_text())
        assert on_disk["seed"] == 1 and on_disk["k"] == 2
        assert RunManifest.read(tmp_path / "manifest.json") == man

    def test_scatter(self, tmp_path):
        emit_scatter(np.array([[1.0, 0.0], [0.0, 1.0]]), ["g", "b"], tmp_path / "s.csv")
        assert (tmp_path / "s.csv").read_text() == "h1,h2,label\n1,0,g\n0,1,b\n"

    def test_scatter_wrong_k(self, tmp_path):
        with pytest.raises(WrongK):
            emit_scatter(np.ones((3, 4)), None, tmp_path / "s.csv")

    @pytest.mark.filterwarnings("ignore:some data columns lie outside")
    def test_ionosphere_scatter_nonnegative(self, iono_raw, tmp_path):
        ds = preprocess_ionosphere(iono_raw)
        res = factorize(ds.matrix, SearchConfig(epsilon=np.pi / 4, i_max=10), 2)
        emit_scatter(res, ds.labels, tmp_path / "s.csv")
        rows = np.genfromtxt(tmp_path / "s.csv", delimiter=",", skip_header=1,
                             usecols=(0, 1))
        assert rows.shape == (IONO_RETAINED, 2)
        assert np.all(rows >= 0)
