from core.io.csv_io import Dataset, LoadedFile, ParseReport, combine, load_csv, load_dataset, save_csv, to_csv_text
from core.io.manifest import build_manifest, dumps, result_document, sha256_file, to_jsonable, write_document
from core.io.svg_charts import bar_chart, line_chart, write_svg

__all__ = [
    "Dataset",
    "LoadedFile",
    "ParseReport",
    "bar_chart",
    "build_manifest",
    "combine",
    "dumps",
    "line_chart",
    "load_csv",
    "load_dataset",
    "result_document",
    "save_csv",
    "sha256_file",
    "to_csv_text",
    "to_jsonable",
    "write_document",
    "write_svg",
]
