from tomoclt.utils.decorators import exit_on_error, requires_closed_form
from tomoclt.utils.helpers import csv_text, json_text, load_json, write_files
from tomoclt.utils.rng import keyed_stream, replicate_stream

__all__ = [
    'exit_on_error', 'requires_closed_form', 'write_files', 'csv_text',
    'json_text', 'load_json', 'keyed_stream', 'replicate_stream',
]
