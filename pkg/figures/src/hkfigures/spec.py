"""Figure specifications: which CSVs feed which plot kind, and where to."""

import json
import os

KINDS = ("loglog_convergence", "time_series", "density", "spectrum", "dim_sweep")


class FigureSpecError(ValueError):
    pass


class FigureSpec:
    """Declarative description of one figure.

    JSON shape:
        {"kind": "loglog_convergence",
         "input_csv": ["initial-error_abc.csv"],
         "output": "fig2.png",
         "options": {"title": "...", ...}}
    """

    def __init__(self, kind, input_csv, output, options=None):
        if kind not in KINDS:
            raise FigureSpecError("unknown figure kind %r (expected one of %s)"
                                  % (kind, list(KINDS)))
        if not input_csv:
            raise FigureSpecError("input_csv must name at least one file")
        self.kind = kind
        self.input_csv = list(input_csv)
        self.output = output
        self.options = dict(options or {})

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - {"kind", "input_csv", "output", "options"}
        if unknown:
            raise FigureSpecError("unknown spec keys %s" % sorted(unknown))
        for key in ("kind", "input_csv", "output"):
            if key not in d:
                raise FigureSpecError("spec is missing %r" % key)
        input_csv = d["input_csv"]
        if isinstance(input_csv, str):
            input_csv = [input_csv]
        return cls(d["kind"], input_csv, d["output"], d.get("options"))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            spec = cls.from_dict(json.load(fh))
        # input paths are relative to the spec file
        base = os.path.dirname(os.path.abspath(path))
        spec.input_csv = [p if os.path.isabs(p) else os.path.join(base, p)
                          for p in spec.input_csv]
        if not os.path.isabs(spec.output):
            spec.output = os.path.join(base, spec.output)
        return spec
