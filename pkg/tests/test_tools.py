from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from combs.comb import Comb, CombPoint, Face
from combs.errors import DomainError, FileFormatError
from spaces.coalescent import brownian_intensity, sample_cpp
from spaces.contour import Contour, sphere_comb
from spaces.staircase import staircase
from spaces.ultrametric import UltrametricMatrix
from tools.comb_tools import (
    comb_from_text,
    comb_to_text,
    format_comb_point,
    format_decimal,
    format_number,
    parse_comb_point,
    parse_number,
    read_comb,
    write_comb,
)
from tools.contour_tools import read_contour_csv, write_contour_csv, write_staircase_csv
from tools.document_tools import (
    FigureInput,
    create_comb_svg,
    create_contour_svg,
    create_excursion_report,
    create_verification_report,
)
from tools.matrix_tools import read_matrix_csv, write_matrix_csv
from tools.sample_tools import read_sample_json, write_sample_json

from strategies import hand_contour

THREE_POINTS_CSV = "0,2,2\n2,0,1\n2,1,0\n"


def polyline_points(document):
    return document.split('points="', 1)[1].split('"', 1)[0].split()


class TestNumbers:
    @pytest.mark.parametrize(
        "text, expected",
        [("3", 3), ("-2", -2), ("3/4", Fraction(3, 4)), ("0.25", 0.25), (" 1e-3 ", 0.001)],
    )
    def test_parse_number(self, text, expected):
        value = parse_number(text)
        assert value == expected
        assert type(value) is type(expected)

    def test_parse_exact_decimal(self):
        assert parse_number("0.1", exact=True) == Fraction(1, 10)

    @pytest.mark.parametrize("text", ["abc", "1/0", ""])
    def test_parse_number_errors(self, text):
        with pytest.raises(FileFormatError):
            parse_number(text)

    def test_format_number(self):
        assert format_number(3) == "3"
        assert format_number(np.int64(5)) == "5"
        assert format_number(Fraction(3, 4)) == "3/4"
        assert format_number(0.1) == "0.1"
        assert format_number(2.0) == "2"
        assert format_number(1 / 3, precision=4) == "0.3333"
        with pytest.raises(TypeError):
            format_number(True)

    def test_format_decimal(self):
        assert format_decimal(Fraction(3, 4)) == "0.75"
        assert format_decimal(Fraction(6, 3)) == "2"
        assert format_decimal(Fraction(2, 3), precision=3) == "0.667"
        assert format_decimal(7) == "7"
        assert float(format_decimal(Fraction(1, 7))) == pytest.approx(1 / 7)

    def test_comb_points(self):
        assert parse_comb_point("1:left") == CombPoint(1, Face.LEFT)
        assert parse_comb_point("1/2") == CombPoint(Fraction(1, 2), Face.INTERIOR)
        assert format_comb_point(CombPoint.right(Fraction(2, 3))) == "2/3:right"
        assert format_comb_point(CombPoint(0.5)) == "0.5"
        with pytest.raises(FileFormatError):
            parse_comb_point("1:up")


class TestCombFile:
    def test_to_text(self):
        comb = Comb(0.0, 3.0, ((1.0, 1.0), (2.0, 2.0)))
        assert comb_to_text(comb) == "comb 0 3\n1 1\n2 2\n"
        assert comb_to_text(Comb(0, 1, ((Fraction(1, 2), 2),))) == "comb 0 1\n0.5 2\n"
        assert comb_to_text(Comb(0, 1, ((Fraction(1, 3), Fraction(3, 2)),))) == "comb 0 1\n0.333333333333 1.5\n"

    def test_from_text_skips_comments(self):
        comb = comb_from_text("# a comb\ncomb 0 1\n\n0.5 2  # one tooth\n")
        assert comb == Comb(0.0, 1.0, ((0.5, 2.0),))

    def test_exact(self):
        comb = comb_from_text("comb 0 1\n0.5 2\n", exact=True)
        assert comb.teeth == ((Fraction(1, 2), 2),)

    @pytest.mark.parametrize("text", ["", "combo 0 1\n", "comb 0\n", "comb 0 1\n0.5\n", "comb 0 1\nx 1\n"])
    def test_malformed(self, text):
        with pytest.raises(FileFormatError):
            comb_from_text(text)

    def test_invalid_comb(self):
        with pytest.raises(DomainError):
            comb_from_text("comb 0 1\n0.5 -1\n")

    def test_file_round_trip(self, tmp_path):
        comb = Comb(0.0, 2.5, ((0.125, 1.5), (1.0, 0.25)))
        path = tmp_path / "teeth.comb"
        document = write_comb(comb, path)
        assert path.read_text() == document
        assert read_comb(path) == comb
        assert write_comb(comb, None) == document


class TestMatrixFile:
    def test_write(self, tmp_path):
        matrix = UltrametricMatrix([[0, 2, 2], [2, 0, 1], [2, 1, 0]])
        path = tmp_path / "m.csv"
        assert write_matrix_csv(matrix, path) == THREE_POINTS_CSV
        assert read_matrix_csv(path) == matrix

    def test_masses(self, tmp_path):
        matrix = UltrametricMatrix(
            [[0, 2, 2], [2, 0, 1], [2, 1, 0]], masses=(Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))
        )
        path = tmp_path / "measured.csv"
        document = write_matrix_csv(matrix, path)
        assert document == THREE_POINTS_CSV + "masses,1/2,1/4,1/4\n"
        assert read_matrix_csv(path) == matrix

    def test_decimal_masses_row(self, tmp_path):
        path = tmp_path / "measured.csv"
        path.write_text("0,0.5,2\n0.5,0,2\n2,2,0\nmasses,0.25,0.25,0.5\n")
        matrix = read_matrix_csv(path)
        assert matrix.masses == (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2))
        assert matrix.distances.tolist() == [[0.0, 0.5, 2.0], [0.5, 0.0, 2.0], [2.0, 2.0, 0.0]]

    @pytest.mark.parametrize("text", ["0,1\n1,0\n1,1\n", "0,1,2\n1,0\n2,1,0\n", "0,far\nfar,0\n", "masses,1\n", ""])
    def test_malformed(self, tmp_path, text):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(FileFormatError):
            read_matrix_csv(path)

    def test_asymmetric(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1\n2,0\n")
        with pytest.raises(DomainError):
            read_matrix_csv(path)

    def test_mass_count(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1\n1,0\nmasses,1\n")
        with pytest.raises(DomainError):
            read_matrix_csv(path)


class TestContourFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "h.csv"
        document = write_contour_csv(hand_contour(), path)
        assert document == "time,value_left_limit,value\n0,0,0\n3,3,3\n5,1,1\n8,4,4\n10,0,0\n"
        assert read_contour_csv(path, exact=True) == hand_contour()

    def test_decimals(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("time,value_left_limit,value\n0,0,0\n0.5,0.5,1.5\n2,0,0\n")
        contour = read_contour_csv(path)
        assert contour.breakpoints[1] == (0.5, 0.5, 1.5)
        assert read_contour_csv(path, exact=True).breakpoints[1] == (Fraction(1, 2), Fraction(1, 2), Fraction(3, 2))

    def test_wrong_columns(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("t,h\n0,0\n1,0\n")
        with pytest.raises(FileFormatError):
            read_contour_csv(path)

    def test_staircase(self, tmp_path):
        local_time = staircase([(Fraction(1, 3), Fraction(2, 3))], 1)
        path = tmp_path / "L.csv"
        write_staircase_csv(local_time, path)
        assert path.read_text() == "x,value\n0,0\n0.333333333333,0.5\n0.666666666667,0.5\n1,1\n"


class TestSampleFile:
    def test_round_trip(self, tmp_path):
        _, sample = sample_cpp(1.0, 0.1, brownian_intensity(), seed=3)
        path = tmp_path / "cpp.json"
        write_sample_json(sample, path)
        assert read_sample_json(path) == sample

    def test_invalid_record(self, tmp_path):
        path = tmp_path / "cpp.json"
        path.write_text('{"T": 1.0, "epsilon": 0.1, "teeth": [], "terminal": [2.0, 0.5]}')
        with pytest.raises(FileFormatError):
            read_sample_json(path)
        path.write_text("{")
        with pytest.raises(FileFormatError):
            read_sample_json(path)


class TestFigures:
    def test_empty_comb(self):
        result = create_comb_svg(Comb(0.0, 1.0), dendrogram=True)
        assert result["document"].count("<line") == 1
        assert result["teeth_count"] == 0
        assert not result["dendrogram"]

    def test_comb_with_dendrogram(self):
        comb = Comb(0.0, 4.0, ((1.0, 1.0), (2.0, 3.0), (3.0, 2.0)))
        result = create_comb_svg(comb, 400, 200, dendrogram=True)
        document = result["document"]
        assert document.count("<line") == 4
        assert document.count("<path") == 6
        assert 'width="400"' in document
        assert create_comb_svg(comb, 400, 200, dendrogram=True)["document"] == document
        assert "<path" not in create_comb_svg(comb)["document"]

    def test_contour(self):
        result = create_contour_svg(hand_contour(), level=2)
        assert len(polyline_points(result["document"])) == 5
        assert result["document"].count("<line") == 1
        jumping = create_contour_svg(Contour(((0, 0, 0), (1, 1, 3), (2, 2, 2), (4, 0, 0))))
        assert len(polyline_points(jumping["document"])) == 5
        assert "<line" not in jumping["document"]

    def test_figure_input(self):
        assert FigureInput().width == 640
        with pytest.raises(ValidationError):
            FigureInput(width=10)


class TestReports:
    def test_excursion_report(self):
        comb, excursions, local_time = sphere_comb(hand_contour(), 2)
        result = create_excursion_report(comb, excursions, local_time)
        document = result["document"]
        assert document.startswith("# Sphere of radius 2\n")
        assert "| 0 | 2 | 4 |" in document
        assert "| 1 | 6 | 9 |" in document
        assert "| 0 | 4 | 6 | 2 | 1/2 | yes |" in document
        assert (result["components_count"], result["excursions_count"], result["teeth_count"]) == (2, 1, 1)

    def test_single_point_report(self):
        contour = Contour(((0, 0, 0), (2, 2, 2), (4, 0, 0)))
        result = create_excursion_report(*sphere_comb(contour, 2))
        assert "single point" in result["document"]

    def test_verification_report(self):
        assert create_verification_report("m.csv", "matrix", ["parse"], [], [])["document"] == "ok\n"
        result = create_verification_report("m.csv", "matrix", ["parse"], [], ["not ultrametric"])
        assert result["document"] == "1 violation(s) in m.csv (matrix)\n- not ultrametric\n"
        assert not result["ok"]
