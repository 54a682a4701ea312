"""Tests for the JSON/CSV helpers."""
import json

import numpy as np
import pytest

from symcentral.utils.errors import InvalidInput
from symcentral.utils.io_utils import (
    dumps_csv, dumps_json, format_number, parse_float_list, parse_range, read_json, write_csv,
    write_json,
)


def test_format_number():
    assert format_number(0.0) == '0.0'
    assert format_number(2.0) == '2.0'
    assert format_number(float('nan')) == 'null'
    assert float(format_number(0.1)) == 0.1
    assert float(format_number(1.0 / 3.0)) == 1.0 / 3.0


def test_dumps_json_is_valid_and_deterministic():
    obj = {'a': np.array([1.0, 2.5]), 'b': [{'c': True, 'd': None}], 'e': np.int64(3), 'f': 'x'}
    text = dumps_json(obj)
    assert text == dumps_json(obj)
    assert json.loads(text) == {'a': [1.0, 2.5], 'b': [{'c': True, 'd': None}], 'e': 3, 'f': 'x'}
    assert '[1.0, 2.5]' in text


def test_dumps_json_rejects_unknown_types():
    with pytest.raises(TypeError):
        dumps_json({'a': object()})


def test_json_file_round_trip(tmp_path):
    path = write_json({'x': [0.1, 0.2]}, tmp_path / 'out.json')
    assert read_json(path) == {'x': [0.1, 0.2]}


def test_read_json_errors(tmp_path):
    with pytest.raises(InvalidInput):
        read_json(tmp_path / 'missing.json')
    bad = tmp_path / 'bad.json'
    bad.write_text('{not json')
    with pytest.raises(InvalidInput):
        read_json(bad)


def test_csv_output(tmp_path):
    rows = [{'t': 0.0, 'E': -1.5}, {'t': 0.5, 'E': -1.25}]
    assert dumps_csv(rows) == 't,E\n0.0,-1.5\n0.5,-1.25\n'
    path = write_csv(rows, tmp_path / 'rows.csv')
    assert path.read_text() == dumps_csv(rows)


def test_parse_float_list_and_range():
    assert parse_float_list('1.2,0.6, 0.2') == [1.2, 0.6, 0.2]
    assert parse_range('1:2:3') == [1.0, 1.5, 2.0]
    assert parse_range('0.5,0.7') == [0.5, 0.7]
    for text in ('a,b', '1:2:0', '1:x:3'):
        with pytest.raises(InvalidInput):
            parse_range(text)
