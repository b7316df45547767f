import json
import logging
import sys
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Optional

from schrodinger.diffop import Bracket


@dataclass
class Result:
    """What a command produced: a text rendering, a JSON payload and whether it verified."""

    text: str
    data: Any
    ok: bool = True


class OutputStrategy(ABC):
    @abstractmethod
    def render(self, result: Result) -> str:
        pass


class TextOutput(OutputStrategy):
    def render(self, result: Result) -> str:
        return result.text


class JsonOutput(OutputStrategy):
    def render(self, result: Result) -> str:
        return json.dumps(result.data, indent=2)


def strategy_for(as_json: bool) -> OutputStrategy:
    return JsonOutput() if as_json else TextOutput()


def write(result: Result, strategy: OutputStrategy, path: Optional[str] = None) -> None:
    rendered = strategy.render(result)
    if path:
        with open(path, "w") as f:
            logging.debug(f"[output] CREATE {path}")
            f.write(rendered + "\n")
        logging.info(f"Results saved to {path}")
    else:
        sys.stdout.write(rendered + "\n")


def format_expansion(expansion) -> str:
    """``c1*g1 + c2*g2`` with coefficients in canonical scalar form."""
    from schrodinger.expr import format_scalar

    if not expansion:
        return "0"
    parts = []
    for coeff, gen in expansion:
        text = format_scalar(coeff)
        negative = text.startswith("-") and " " not in text
        if negative:
            text = text[1:]
        if text == "1":
            body = gen
        elif " " in text or text.startswith("("):
            body = f"({text})*{gen}"
        else:
            body = f"{text}*{gen}"
        parts.append((negative, body))
    out = ("-" if parts[0][0] else "") + parts[0][1]
    for negative, body in parts[1:]:
        out += f" {'-' if negative else '+'} {body}"
    return out


def format_bracket(left: str, right: str, kind: Bracket) -> str:
    if kind is Bracket.ANTICOMMUTATOR:
        return f"{{{left}, {right}}}"
    return f"[{left}, {right}]"
