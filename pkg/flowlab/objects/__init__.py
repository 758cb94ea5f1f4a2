from .report import Report, ReportTable, REPORT_SCHEMA, RNG_NAME, atomic_write
from .table import Job, JobTable, serial_take_data
from .stepper import Stepper, set_debug_mode
