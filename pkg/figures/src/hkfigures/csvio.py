"""Reading of the experiment CSV outputs (comment block, header, rows)."""

import csv


class NamedColumnError(KeyError):
    """A renderer asked for a column the CSV does not carry."""


class EmptyInputError(ValueError):
    """The CSV parsed but contains no data rows."""


class Table:
    def __init__(self, columns, rows, meta):
        self.columns = columns
        self.rows = rows
        self.meta = meta

    def column(self, name, numeric=True):
        """One column as a list; numeric cells parsed, blanks become None."""
        if name not in self.columns:
            raise NamedColumnError(
                "column %r not in CSV (have %s)" % (name, self.columns))
        i = self.columns.index(name)
        out = []
        for row in self.rows:
            cell = row[i]
            if not numeric:
                out.append(cell)
            elif cell == "":
                out.append(None)
            else:
                out.append(float(cell))
        return out

    def require(self, names):
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise NamedColumnError(
                "CSV is missing required columns %s (have %s)"
                % (missing, self.columns))


def read_table(path):
    """Parse an experiment CSV: '#' metadata lines, a header, data rows."""
    meta = {}
    with open(path, newline="") as fh:
        lines = list(csv.reader(fh))
    body = []
    for line in lines:
        if line and line[0].startswith("#"):
            text = ",".join(line).lstrip("# ")
            if ":" in text:
                key, val = text.split(":", 1)
                meta[key.strip()] = val.strip()
            continue
        if line:
            body.append(line)
    if not body:
        raise EmptyInputError("%s: no header row found" % path)
    columns, rows = body[0], body[1:]
    if not rows:
        raise EmptyInputError("%s: CSV has a header but no data rows" % path)
    return Table(columns, rows, meta)
