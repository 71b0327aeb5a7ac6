from .report_writer import REPORT_JSON, emit_report, load_report, render_summary

__all__ = ["REPORT_JSON", "emit_report", "load_report", "render_summary"]
