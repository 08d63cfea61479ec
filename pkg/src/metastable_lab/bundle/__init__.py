"""CSV and JSON output of result bundles."""

from .writer import BundleWriter, dumps, read_csv, to_jsonable

__all__ = ["BundleWriter", "dumps", "read_csv", "to_jsonable"]
