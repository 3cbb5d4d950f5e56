import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dfngan.exceptions import CorruptHeader, DimensionMismatch
from dfngan.matrix_io import load_matrix, save_matrix


class TestMatrixText:
    def test_layout(self, tmp_path):
        save_matrix(tmp_path / "m.txt", [[1.0, 2.0], [0.0, 3.0]])
        assert (tmp_path / "m.txt").read_text() == "2 2\n1 2\n0 3\n"

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)),
                  elements=st.floats(allow_nan=False, allow_infinity=False)))
    def test_round_trip_exact(self, tmp_path_factory, x):
        path = tmp_path_factory.mktemp("io") / "m.txt"
        save_matrix(path, x)
        np.testing.assert_array_equal(load_matrix(path), x)

    def test_bad_header(self, tmp_path):
        (tmp_path / "m.txt").write_text("two two\n1 2\n")
        with pytest.raises(CorruptHeader):
            load_matrix(tmp_path / "m.txt")

    def test_row_count_mismatch(self, tmp_path):
        (tmp_path / "m.txt").write_text("3 2\n1 2\n3 4\n")
        with pytest.raises(DimensionMismatch):
            load_matrix(tmp_path / "m.txt")

    def test_ragged_row(self, tmp_path):
        (tmp_path / "m.txt").write_text("2 2\n1 2\n3\n")
        with pytest.raises(DimensionMismatch):
            load_matrix(tmp_path / "m.txt")
