# Copyright 2026 The empkit Authors.
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

"""End-to-end checks of the empkit binary: exit codes, key output lines and
the JSON report schema.

Usage: cli_test.py <empkit binary> <examples dir> <report schema>
"""

import json
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

BINARY = EXAMPLES = SCHEMA = None


def run(*args):
    return subprocess.run([BINARY, *args], capture_output=True, text=True, timeout=300)


class CliTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.fig1 = os.path.join(EXAMPLES, "fig1.json")
        with open(SCHEMA) as f:
            cls.validator = jsonschema.Draft202012Validator(json.load(f))
        cls.tmp = tempfile.TemporaryDirectory()

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w") as f:
            f.write(text)
        return path

    def report(self, *args, code=0):
        r = run(*args, "--format", "json")
        self.assertEqual(r.returncode, code, r.stderr)
        doc = json.loads(r.stdout)
        self.validator.validate(doc)
        return doc

    def test_classify(self):
        r = run("classify", self.fig1)
        self.assertEqual(r.returncode, 0)
        self.assertIn("sources: 1 | sinks: 6 7 | dources: 2 5 | dinks: 4", r.stdout)
        doc = self.report("classify", self.fig1)
        self.assertEqual(doc["classification"]["dinks"], ["4"])

    def test_synthesize_strategies(self):
        expected = {
            "col-ltr": "E125,M23467",
            "col-rtl": "E12345,M467",
            "row-ttb": "E125,M234567",
            "explicit": "E12345,M234567",
        }
        for strategy, emp in expected.items():
            doc = self.report("synthesize", self.fig1, "--strategy", strategy, "--trials", "1")
            self.assertEqual(doc["emp"]["text"], emp, strategy)
            self.assertTrue(all(v["valid"] for v in doc["verdicts"]))
        r = run("synthesize", self.fig1, "--trials", "1")
        self.assertEqual(r.returncode, 0)
        self.assertEqual(r.stdout.strip().splitlines()[-1], "EMP: E125,M23467 (ν = 8; bounds 7..11)")

    def test_verify_exit_codes(self):
        self.assertEqual(self.report("verify", self.fig1, "--emp", "E125,M23467")["valid"], True)
        doc = self.report("verify", self.fig1, "--emp", "E125,M467", code=1)
        self.assertTrue(doc["oracles_skipped"])
        self.assertEqual(run("verify", self.fig1, "--emp", "E1235,M467").returncode, 1)
        self.assertEqual(run("verify", self.fig1, "--emp", "E1,M9").returncode, 2)
        self.assertEqual(run("verify", self.fig1).returncode, 2)

    def test_minimal(self):
        doc = self.report("minimal", self.fig1, "--jobs", "2")
        self.assertEqual(doc["minimal"]["cardinality"], 8)
        self.assertEqual(doc["minimal"]["emps"], ["E12345,M467", "E1235,M3467", "E125,M23467"])
        big = self.write("chain11.json", json.dumps({
            "nodes": [str(v) for v in range(1, 12)],
            "edges": [[str(v), str(v + 1)] for v in range(1, 11)]}))
        r = run("minimal", big)
        self.assertEqual(r.returncode, 2)
        self.assertIn("--node-limit", r.stderr)

    def test_input_errors(self):
        cases = {
            "empty.json": '{"nodes": [], "edges": []}',
            "cycle.json": '{"nodes": ["a", "b"], "edges": [["a", "b"], ["b", "a"]]}',
            "syntax.json": '{"nodes": ["a",\n',
            "loop.json": '{"nodes": ["a"], "edges": [["a", "a"]]}',
        }
        for name, text in cases.items():
            r = run("classify", self.write(name, text))
            self.assertEqual(r.returncode, 2, name)
            self.assertTrue(r.stderr.startswith("error: "), name)
        r = run("classify", self.write("cycle2.json", cases["cycle.json"]))
        self.assertIn("cycle", r.stderr)
        self.assertEqual(run("classify", os.path.join(self.tmp.name, "missing.json")).returncode, 2)
        self.assertEqual(run("classify", self.fig1, "--strategy", "spiral").returncode, 2)
        self.assertEqual(run("frobnicate").returncode, 2)

    def test_export_dot_round_trip(self):
        r = run("export-dot", self.fig1, "--emp", "E125,M23467")
        self.assertEqual(r.returncode, 0)
        self.assertTrue(r.stdout.startswith("digraph network {"))
        edges = []
        for line in r.stdout.splitlines():
            if "->" in line:
                tail, head = line.strip().rstrip(";").split(" -> ")
                edges.append([tail.strip('"'), head.strip('"')])
        with open(self.fig1) as f:
            source = json.load(f)
        self.assertEqual(sorted(edges), sorted(source["edges"]))

    def test_reports_are_deterministic(self):
        first = run("synthesize", self.fig1, "--format", "json", "--seed", "7").stdout
        second = run("synthesize", self.fig1, "--format", "json", "--seed", "7").stdout
        self.assertEqual(first, second)


if __name__ == "__main__":
    BINARY, EXAMPLES, SCHEMA = sys.argv[1:4]
    unittest.main(argv=sys.argv[:1], verbosity=2)
