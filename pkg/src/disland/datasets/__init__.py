# MIT License
#
# Copyright (c) 2024 The disland authors
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.
import glob
import os
from pathlib import Path
from typing import Optional


def supported_file_extensions():
    return [
        "gr",
        "co",
        "gr.gz",
        "co.gz",
    ]


def strip_extension(path: Path) -> str:
    name = path.name
    for ext in sorted(supported_file_extensions(), key=len, reverse=True):
        if name.endswith(f".{ext}"):
            return name[: -len(ext) - 1]
    return path.stem


def find_coordinates_file(gr_file: Path) -> Optional[Path]:
    """Attempts to resolve the .co companion of a .gr file.

    DIMACS ships e.g. USA-road-d.COL.gr next to USA-road-d.COL.co, so the candidate
    sharing the longest common prefix with the graph file wins.
    """
    gr_file = Path(gr_file)
    dir_path = gr_file.parent if str(gr_file.parent) else Path(os.getcwd())
    candidates = sorted(
        glob.glob(os.path.join(dir_path, "*.co")) + glob.glob(os.path.join(dir_path, "*.co.gz"))
    )
    if not candidates:
        return None
    stem = strip_extension(gr_file)
    prefix_sizes = [
        len(os.path.commonprefix((stem, strip_extension(Path(p))))) for p in candidates
    ]
    best = max(range(len(candidates)), key=lambda i: prefix_sizes[i])
    if prefix_sizes[best] == 0:
        return None
    return Path(candidates[best])
