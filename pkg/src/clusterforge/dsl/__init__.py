from .runner import DesignState, RunError, RunReport, default_options, execute, run_file
from .script import COMMANDS, Command, Script, ScriptError, parse_script
from .svg import draw_rows
from .writers import format_cable_table, format_summary, parse_summary_text, write_cable_table, write_summary

__all__ = [
    "COMMANDS", "Command", "DesignState", "RunError", "RunReport", "Script", "ScriptError",
    "default_options", "draw_rows", "execute", "format_cable_table", "format_summary",
    "parse_script", "parse_summary_text", "run_file", "write_cable_table", "write_summary",
]
