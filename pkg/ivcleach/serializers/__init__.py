from .charts import Series, emit_charts
from .events import write_events
from .manifest import RunManifest, write_manifest
from .rounds_csv import RoundsTable, read_rounds_csv, write_rounds_csv
from .serialize import Serialize
from .summary import write_summary
