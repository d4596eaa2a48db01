"""
Benchmark harness: instance generation, metrics, file formats and suite runs.
"""
