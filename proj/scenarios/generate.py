#!/usr/bin/env python3
# Copyright 2026 The tether_va Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerate the text maps used by the scenario corpus."""

import pathlib

HERE = pathlib.Path(__file__).resolve().parent


def write_map(name, dims, boxes, resolution=0.25):
    nx, ny, nz = dims
    occ = set()
    for (x0, x1), (y0, y1), (z0, z1) in boxes:
        for x in range(x0, x1 + 1):
            for y in range(y0, y1 + 1):
                for z in range(z0, z1 + 1):
                    occ.add((x, y, z))
    lines = [f"resolution {resolution}", "origin 0 0 0", ""]
    for z in range(nz):
        for y in reversed(range(ny)):
            lines.append("".join("#" if (x, y, z) in occ else "." for x in range(nx)))
        lines.append("")
    (HERE / name).write_text("\n".join(lines))


# 6 x 3 x 6 m room, two full-height columns side by side.
write_map("indoor.map", (24, 12, 24), [
    ((7, 10), (0, 11), (10, 13)),   # white column
    ((13, 16), (0, 11), (10, 13)),  # blue column
])

# 8 x 3 x 8 m yard with one wide wall between launch site and task.
write_map("outdoor.map", (32, 12, 32), [
    ((8, 23), (0, 11), (14, 15)),
])

write_map("empty_room.map", (16, 12, 16), [])
