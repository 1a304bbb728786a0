"""CSV tables, JSON summaries and run manifests."""

from .tables import rows_to_csv, write_csv
from .manifest import build_manifest, write_json, write_manifest

__all__ = ['rows_to_csv', 'write_csv', 'build_manifest', 'write_json', 'write_manifest']
