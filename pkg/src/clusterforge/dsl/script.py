"""Design-script grammar: one command call per line.

    script   := { command (NEWLINE | ';') }
    command  := NAME '(' [ arg { ',' arg } [','] ] ')'
    arg      := NAME '=' literal | literal
    literal  := NUMBER | STRING | 'True' | 'False' | 'None' | list | map
    list     := '[' [ literal { ',' literal } [','] ] ']'
    map      := '{' [ STRING ':' literal { ',' STRING ':' literal } [','] ] '}'

Newlines inside brackets, braces, parentheses and quoted strings are
ordinary whitespace.  ``#`` starts a comment running to end of line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

_REQUIRED = object()

# name -> ordered (parameter, default); _REQUIRED marks mandatory ones
COMMANDS = {
    "open_db": (("files", _REQUIRED),),
    "constraint": (("expr", _REQUIRED),),
    "metric": (("expr", _REQUIRED),),
    "select_best": (("metric", _REQUIRED), ("direction", "min")),
    "rank_and_trim": (("metric", _REQUIRED), ("fraction", _REQUIRED)),
    "delete": (),
    "update_metrics": (),
    "set_option": (("key", _REQUIRED), ("value", _REQUIRED)),
    "performance": (("target", None),),
    "network": (("topology", "fat-tree"), ("objective", "cost")),
    "ups": (("backup_min", None), ("objective", "cost")),
    "add_group": (("name", _REQUIRED),),
    "place": (("place_params", None),),
    "cables": (),
    "print_design": (("file", None),),
    "draw_rows": (("rows", None), ("file", "racks.svg")),
}


class ScriptError(Exception):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
        self.message = message


@dataclass(frozen=True)
class Command:
    name: str
    args: dict = field(default_factory=dict)
    line: int = 0


@dataclass(frozen=True)
class Script:
    commands: tuple = ()
    source: str = field(default="", compare=False)

    def __len__(self):
        return len(self.commands)

    def __iter__(self):
        return iter(self.commands)


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<str>'(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*")
  | (?P<punct>[()\[\]{},=:;])
""", re.VERBOSE | re.DOTALL)

_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"'}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int


def _unquote(text, line):
    body, out, i = text[1:-1], [], 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            if nxt not in _ESCAPES:
                raise ScriptError(f"unknown escape \\{nxt} in string", line)
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def tokenize(source: str) -> list:
    toks, pos, line, depth = [], 0, 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            ch = source[pos]
            if ch in "'\"":
                raise ScriptError("unterminated string", line)
            raise ScriptError(f"unexpected character {ch!r}", line)
        kind, text = m.lastgroup, m.group()
        if kind == "nl":
            if depth == 0:
                toks.append(_Tok("end", text, line))
        elif kind == "punct":
            if text in "([{":
                depth += 1
            elif text in ")]}":
                depth = max(depth - 1, 0)
            toks.append(_Tok("end" if text == ";" else text, text, line))
        elif kind in ("num", "name", "str"):
            toks.append(_Tok(kind, text, line))
        line += text.count("\n")
        pos = m.end()
    toks.append(_Tok("eof", "", line))
    return toks


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def take(self, kind=None):
        t = self.tok
        if kind is not None and t.kind != kind:
            want = {"name": "a name", "str": "a string", "eof": "end of script"}.get(kind, repr(kind))
            got = "end of line" if t.kind == "end" else ("end of script" if t.kind == "eof" else repr(t.text))
            raise ScriptError(f"expected {want}, found {got}", t.line)
        self.i += 1
        return t

    def script(self):
        cmds = []
        while self.tok.kind != "eof":
            if self.tok.kind == "end":
                self.i += 1
                continue
            cmds.append(self.command())
            if self.tok.kind not in ("end", "eof"):
                raise ScriptError(f"unexpected {self.tok.text!r} after command", self.tok.line)
        return cmds

    def command(self):
        t = self.take("name")
        if t.text not in COMMANDS:
            raise ScriptError(f"unknown command '{t.text}'", t.line)
        self.take("(")
        positional, keyword = [], {}
        while self.tok.kind != ")":
            a = self.tok
            if a.kind == "name" and self.toks[self.i + 1].kind == "=":
                self.i += 2
                if a.text in keyword:
                    raise ScriptError(f"argument '{a.text}' given twice", a.line)
                keyword[a.text] = self.literal()
            else:
                if keyword:
                    raise ScriptError("positional argument after keyword argument", a.line)
                positional.append(self.literal())
            if self.tok.kind != ")":
                self.take(",")
        self.take(")")
        return Command(t.text, _bind(t.text, positional, keyword, t.line), t.line)

    def literal(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            v = float(t.text)
            return int(v) if re.fullmatch(r"[-+]?\d+", t.text) else v
        if t.kind == "str":
            self.i += 1
            return _unquote(t.text, t.line)
        if t.kind == "name" and t.text in ("True", "False", "None", "true", "false", "null"):
            self.i += 1
            return {"True": True, "true": True, "False": False, "false": False}.get(t.text)
        if t.kind == "[":
            self.i += 1
            items = []
            while self.tok.kind != "]":
                items.append(self.literal())
                if self.tok.kind != "]":
                    self.take(",")
            self.take("]")
            return items
        if t.kind == "{":
            self.i += 1
            out = {}
            while self.tok.kind != "}":
                k = self.take("str")
                self.take(":")
                out[_unquote(k.text, k.line)] = self.literal()
                if self.tok.kind != "}":
                    self.take(",")
            self.take("}")
            return out
        shown = "end of line" if t.kind == "end" else (t.text or "end of script")
        raise ScriptError(f"malformed literal at {shown!r}", t.line)


def _bind(name, positional, keyword, line):
    params = COMMANDS[name]
    if len(positional) > len(params):
        raise ScriptError(f"{name}() takes at most {len(params)} argument(s), got {len(positional)}", line)
    out = {}
    for (p, _), v in zip(params, positional):
        out[p] = v
    names = [p for p, _ in params]
    for k, v in keyword.items():
        if k not in names:
            raise ScriptError(f"{name}() has no parameter '{k}'", line)
        if k in out:
            raise ScriptError(f"{name}() got '{k}' twice", line)
        out[k] = v
    for p, default in params:
        if p not in out:
            if default is _REQUIRED:
                raise ScriptError(f"{name}() is missing argument '{p}'", line)
            out[p] = default
    return out


def parse_script(source: str) -> Script:
    return Script(tuple(_Parser(tokenize(source)).script()), source)
