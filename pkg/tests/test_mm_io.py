"""Matrix Market parsing, symmetry expansion, and exact write/read cycles."""

import io

import numpy as np
import pytest

from cskrylov.mm_io import read_matrix_market, write_matrix_market
from cskrylov.oracle import ProblemSpec, gen_problem

BANNER = "%%MatrixMarket matrix coordinate complex symmetric"


def _read(text):
    return read_matrix_market(text.encode())


class TestCoordinateRead:
    def test_minimal_symmetric(self):
        header, m = _read(f"{BANNER}\n2 2 2\n1 1 1.0 0.0\n2 1 0.0 1.0\n")
        assert (header.format, header.field, header.symmetry) == (
            "coordinate",
            "complex",
            "symmetric",
        )
        np.testing.assert_array_equal(
            m.to_dense(), np.array([[1.0, 1j], [1j, 0.0]])
        )
        assert m.storage == "csr"
        assert m.nnz == 3  # off-diagonal mirrored

    def test_general_not_expanded(self):
        text = (
            "%%MatrixMarket matrix coordinate complex general\n"
            "2 2 2\n1 2 1.0 0.0\n2 1 2.0 0.0\n"
        )
        _, m = _read(text)
        np.testing.assert_array_equal(m.to_dense(), [[0, 1.0], [2.0, 0]])
        assert not m.is_symmetric

    def test_hermitian_mirrors_conjugate(self):
        text = (
            "%%MatrixMarket matrix coordinate complex hermitian\n"
            "2 2 2\n1 1 1.0 0.0\n2 1 1.0 2.0\n"
        )
        _, m = _read(text)
        np.testing.assert_array_equal(
            m.to_dense(), np.array([[1.0, 1 - 2j], [1 + 2j, 0.0]])
        )
        assert not m.is_symmetric  # hermitian with complex off-diagonals

    def test_skew_mirrors_negated(self):
        text = (
            "%%MatrixMarket matrix coordinate real skew-symmetric\n"
            "2 2 1\n2 1 3.0\n"
        )
        _, m = _read(text)
        np.testing.assert_array_equal(m.to_dense(), [[0, -3.0], [3.0, 0]])

    def test_real_and_integer_promote_to_complex(self):
        _, m = _read(
            "%%MatrixMarket matrix coordinate real symmetric\n1 1 1\n1 1 2.5\n"
        )
        assert m.to_dense()[0, 0] == 2.5 + 0j
        _, m = _read(
            "%%MatrixMarket matrix coordinate integer symmetric\n1 1 1\n1 1 7\n"
        )
        assert m.to_dense()[0, 0] == 7 + 0j

    def test_fortran_exponents(self):
        _, m = _read(f"{BANNER}\n1 1 1\n1 1 1.5D+03 -2.5d-01\n")
        assert m.to_dense()[0, 0] == 1500.0 - 0.25j

    def test_comments_and_blank_lines_anywhere(self):
        text = (
            f"\n{BANNER}\n% a comment\n\n2 2 2\n1 1 1.0 0.0\n"
            "% mid-data comment\n\n2 1 0.0 1.0\n"
        )
        _, m = _read(text)
        assert m.nnz == 3

    def test_banner_case_insensitive(self):
        header, _ = _read(
            "%%matrixmarket MATRIX Coordinate Complex SYMMETRIC\n1 1 1\n1 1 1 0\n"
        )
        assert header.symmetry == "symmetric"


class TestCoordinateErrors:
    @pytest.mark.parametrize(
        "banner",
        [
            "%%MatrixMarket matrix coordinate complex",
            "%MatrixMarket matrix coordinate complex symmetric",
            "%%MatrixMarket tensor coordinate complex symmetric",
            "%%MatrixMarket matrix triplet complex symmetric",
            "%%MatrixMarket matrix coordinate quaternion symmetric",
            "%%MatrixMarket matrix coordinate complex sideways",
        ],
    )
    def test_bad_banner(self, banner):
        with pytest.raises(ValueError):
            _read(f"{banner}\n1 1 1\n1 1 1 0\n")

    def test_pattern_rejected(self):
        with pytest.raises(ValueError, match="pattern"):
            _read(
                "%%MatrixMarket matrix coordinate pattern symmetric\n1 1 1\n1 1\n"
            )

    def test_empty_input(self):
        with pytest.raises(ValueError, match="no banner"):
            _read("")

    def test_missing_size_line(self):
        with pytest.raises(ValueError, match="missing size line"):
            _read(f"{BANNER}\n% only comments\n")

    def test_bad_size_line(self):
        with pytest.raises(ValueError, match="size line"):
            _read(f"{BANNER}\n2 2\n")

    def test_non_square_rejected(self):
        with pytest.raises(ValueError, match="square"):
            _read(f"{BANNER}\n2 3 1\n1 1 1 0\n")

    def test_too_few_entries(self):
        with pytest.raises(ValueError, match="declares 2, file has 1"):
            _read(f"{BANNER}\n2 2 2\n1 1 1 0\n")

    def test_too_many_entries(self):
        with pytest.raises(ValueError, match="file has more"):
            _read(f"{BANNER}\n2 2 1\n1 1 1 0\n2 1 1 0\n")

    def test_out_of_bounds_index(self):
        with pytest.raises(ValueError, match="out of bounds"):
            _read(f"{BANNER}\n2 2 1\n3 1 1 0\n")

    def test_duplicate_entry_reported_one_based(self):
        with pytest.raises(ValueError, match=r"duplicate entry at \(2, 1\)"):
            _read(f"{BANNER}\n2 2 2\n2 1 1 0\n2 1 2 0\n")

    def test_upper_triangle_rejected_in_symmetric(self):
        with pytest.raises(ValueError, match="row >= col"):
            _read(f"{BANNER}\n2 2 1\n1 2 1 0\n")

    def test_diagonal_rejected_in_skew(self):
        with pytest.raises(ValueError, match="row > col"):
            _read(
                "%%MatrixMarket matrix coordinate real skew-symmetric\n"
                "2 2 1\n1 1 1.0\n"
            )

    def test_complex_entry_needs_two_values(self):
        with pytest.raises(ValueError, match="two values"):
            _read(f"{BANNER}\n1 1 1\n1 1 1.0\n")

    def test_bad_numeric_token(self):
        with pytest.raises(ValueError, match="bad numeric token"):
            _read(f"{BANNER}\n1 1 1\n1 1 abc 0\n")


class TestArrayRead:
    def test_general_column_major(self):
        text = (
            "%%MatrixMarket matrix array complex general\n"
            "2 2\n1 0\n2 0\n3 0\n4 0\n"
        )
        _, m = _read(text)
        assert m.storage == "dense"
        np.testing.assert_array_equal(m.to_dense(), [[1, 3], [2, 4]])

    def test_symmetric_lower_packed(self):
        text = (
            "%%MatrixMarket matrix array complex symmetric\n"
            "2 2\n1 1\n2 0\n3 0\n"
        )
        _, m = _read(text)
        np.testing.assert_array_equal(
            m.to_dense(), np.array([[1 + 1j, 2], [2, 3]])
        )
        assert m.is_symmetric

    def test_hermitian_mirrors_conjugate(self):
        text = (
            "%%MatrixMarket matrix array complex hermitian\n"
            "2 2\n1 0\n2 1\n3 0\n"
        )
        _, m = _read(text)
        np.testing.assert_array_equal(
            m.to_dense(), np.array([[1, 2 - 1j], [2 + 1j, 3]])
        )

    def test_skew_symmetric(self):
        text = "%%MatrixMarket matrix array real skew-symmetric\n2 2\n5\n"
        _, m = _read(text)
        np.testing.assert_array_equal(m.to_dense(), [[0, -5.0], [5.0, 0]])

    def test_wrong_value_count(self):
        with pytest.raises(ValueError, match="needs 4 values"):
            _read("%%MatrixMarket matrix array complex general\n2 2\n1 0\n2 0\n")

    def test_array_size_line_two_tokens(self):
        with pytest.raises(ValueError, match="rows cols"):
            _read("%%MatrixMarket matrix array complex general\n2 2 4\n")


class TestWriter:
    def test_refuses_non_symmetric(self):
        from cskrylov.core_la import ComplexSymmetricMatrix

        m = ComplexSymmetricMatrix.from_dense([[1, 2], [0, 1]])
        with pytest.raises(ValueError, match="refusing to write"):
            write_matrix_market(m, io.StringIO())

    def test_exact_output_layout(self):
        _, m = _read(f"{BANNER}\n2 2 2\n1 1 1.0 0.0\n2 1 0.0 1.0\n")
        buf = io.StringIO()
        write_matrix_market(m, buf, comments=("generated for tests", ""))
        lines = buf.getvalue().splitlines()
        assert lines[0] == BANNER
        assert lines[1] == "% generated for tests"
        assert lines[2] == "%"
        assert lines[3] == "2 2 2"
        assert lines[4] == "1 1 1 0"
        assert lines[5] == "2 1 0 1"

    def test_round_trip_generated_csr(self):
        m, _ = gen_problem(ProblemSpec(n=50, p=1, kind="diagdominant", seed=12))
        buf = io.StringIO()
        write_matrix_market(m, buf)
        _, m2 = read_matrix_market(buf.getvalue().encode())
        np.testing.assert_array_equal(m.to_dense(), m2.to_dense())

    def test_round_trip_dense_storage(self):
        text = (
            "%%MatrixMarket matrix array complex symmetric\n"
            "2 2\n1.25 -0.5\n0.125 3.0\n-7.5 0.0\n"
        )
        _, m = _read(text)
        buf = io.StringIO()
        write_matrix_market(m, buf)
        _, m2 = read_matrix_market(buf.getvalue().encode())
        np.testing.assert_array_equal(m.to_dense(), m2.to_dense())

    def test_round_trip_empty(self):
        _, m = _read(f"{BANNER}\n3 3 0\n")
        buf = io.StringIO()
        write_matrix_market(m, buf)
        _, m2 = read_matrix_market(buf.getvalue().encode())
        assert m2.n == 3 and m2.nnz == 0

    def test_path_destinations(self, tmp_path):
        _, m = _read(f"{BANNER}\n1 1 1\n1 1 0.5 -0.5\n")
        dest = tmp_path / "tiny.mtx"
        write_matrix_market(m, dest)
        _, m2 = read_matrix_market(dest)
        np.testing.assert_array_equal(m.to_dense(), m2.to_dense())

    def test_seventeen_digit_values_survive(self):
        from cskrylov.core_la import ComplexSymmetricMatrix

        v = 1.0 / 3.0 + (2.0 / 7.0) * 1j
        m = ComplexSymmetricMatrix.from_coo(1, [0], [0], [v])
        buf = io.StringIO()
        write_matrix_market(m, buf)
        _, m2 = read_matrix_market(buf.getvalue().encode())
        assert m2.to_dense()[0, 0] == v


class TestSourceKinds:
    def test_bytes_str_path_and_file_objects(self, tmp_path):
        text = f"{BANNER}\n1 1 1\n1 1 2.0 0.0\n"
        path = tmp_path / "a.mtx"
        path.write_text(text)
        for source in (
            text.encode(),
            str(path),
            path,
            io.StringIO(text),
            io.BytesIO(text.encode()),
        ):
            _, m = read_matrix_market(source)
            assert m.to_dense()[0, 0] == 2.0


class TestBundledMatrix:
    def test_acoustic_fixture_facts(self, young1c):
        assert young1c.n == 841
        assert young1c.nnz == 4089
        assert young1c.is_symmetric
        d = young1c.to_dense()
        # complex symmetric but NOT hermitian
        assert not np.array_equal(d, np.conj(d.T))
        assert np.count_nonzero(young1c.values.imag) > 0

    def test_acoustic_fixture_round_trips(self, young1c):
        buf = io.StringIO()
        write_matrix_market(young1c, buf)
        _, m2 = read_matrix_market(buf.getvalue().encode())
        np.testing.assert_array_equal(young1c.to_dense(), m2.to_dense())
