"""Config-driven experiments, file formats and the ``rae`` command line."""
