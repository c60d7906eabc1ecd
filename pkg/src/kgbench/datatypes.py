"""Lexical-form checks for the xsd datatypes the ontology uses."""

from __future__ import annotations

import datetime as _dt
import math
import re

from .namespaces import XSD, XSD_BOOLEAN, XSD_DATE, XSD_DECIMAL, XSD_DOUBLE, XSD_GYEAR, XSD_INTEGER, XSD_STRING

_INT = re.compile(r"^[+-]?\d+$")
_DEC = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)$")
_DBL = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_YEAR = re.compile(r"^-?\d{4}$")
_DATE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


def valid_lexical(value: str, datatype: str) -> bool:
    """Whether ``value`` is a well-formed lexical form of ``datatype``."""
    if datatype == XSD_STRING:
        return True
    if datatype == XSD_INTEGER:
        return bool(_INT.match(value))
    if datatype == XSD_DECIMAL:
        return bool(_DEC.match(value))
    if datatype == XSD_DOUBLE:
        return bool(_DBL.match(value)) and math.isfinite(float(value))
    if datatype == XSD_DATE:
        if not _DATE.match(value):
            return False
        try:
            _dt.date.fromisoformat(value)
        except ValueError:
            return False
        return True
    if datatype == XSD_GYEAR:
        return bool(_YEAR.match(value))
    if datatype == XSD_BOOLEAN:
        return value in ("true", "false", "0", "1")
    # unknown xsd types: anything goes; non-xsd datatypes are never checked
    return str(datatype).startswith(XSD)


def canonical_lexical(value: str, datatype: str) -> str:
    """Canonical spelling for numeric types; other values are returned unchanged."""
    if datatype == XSD_INTEGER:
        return str(int(value))
    if datatype == XSD_DOUBLE:
        return repr(float(value))
    return value
