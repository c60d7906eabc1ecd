"""Knowledge-graph integration benchmark: generator, pipelines, metrics."""
