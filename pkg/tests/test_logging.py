import io
import logging

from magnon_benchkit.logging import get_logger, setup_logging


def test_child_loggers_reach_handler():
    buf = io.StringIO()
    setup_logging(stream=buf)
    logging.getLogger("magnon_benchkit.spectra").info("hello spectra")
    logging.getLogger("magnon_benchkit.spectra").debug("hidden")
    text = buf.getvalue()
    assert "hello spectra" in text
    assert "hidden" not in text
    assert get_logger().level == logging.INFO


def test_verbose_and_file(tmp_path):
    buf = io.StringIO()
    path = tmp_path / "logs" / "run.log"
    logger = setup_logging(verbose=True, stream=buf, log_file=path)
    logger.debug("debug line")
    assert "debug line" in buf.getvalue()
    assert "debug line" in path.read_text()
    setup_logging(stream=io.StringIO())
