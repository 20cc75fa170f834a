from .config import ConfigError, format_config, load_config, parse_config
from .csvio import read_csv, write_csv
from .main import run
from .svg import AxesSpec, emit_svg, render_svg

__all__ = ["ConfigError", "format_config", "load_config", "parse_config", "read_csv",
           "write_csv", "run", "AxesSpec", "emit_svg", "render_svg"]
