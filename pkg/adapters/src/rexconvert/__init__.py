"""Format converters feeding the canonical relation-extraction schema."""

from .canonical import SCHEMA_ID, ConversionError
from .span_json import convert_span_json, export_span_json, parse_span_json
from .tabular import DecodeResult, convert_tabular, decode_tags

__version__ = "0.1.0"
