"""
Comb Ultrametric - Tools Module
This package contains the file formats, figures and reports of the command line.
"""

from .comb_tools import format_decimal, format_number, parse_comb_point, parse_number, read_comb, write_comb
from .contour_tools import read_contour_csv, write_contour_csv, write_staircase_csv
from .document_tools import create_comb_svg, create_contour_svg, create_excursion_report, create_verification_report
from .matrix_tools import read_matrix_csv, write_matrix_csv
from .sample_tools import SampleRecord, read_sample_json, write_sample_json

__all__ = [
    'format_decimal',
    'format_number',
    'parse_number',
    'parse_comb_point',
    'read_comb',
    'write_comb',
    'read_matrix_csv',
    'write_matrix_csv',
    'read_contour_csv',
    'write_contour_csv',
    'write_staircase_csv',
    'SampleRecord',
    'read_sample_json',
    'write_sample_json',
    'create_comb_svg',
    'create_contour_svg',
    'create_excursion_report',
    'create_verification_report',
]
