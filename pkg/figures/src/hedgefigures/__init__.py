"""Panel renderer for benchmark regret CSVs; the CSV schema is the only contract."""

from .reader import PanelData, SchemaError, read_panel_csv
from .render import PanelSpec, RenderResult, SeriesInfo, render_panel

__version__ = "0.1.0"
