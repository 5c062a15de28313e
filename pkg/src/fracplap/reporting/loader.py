"""Report loader utility for loading and rendering Jinja2 templates."""

from importlib.resources import files
from pathlib import Path
from typing import Any, cast

from jinja2 import Environment, FileSystemLoader, Template, TemplateNotFound


def _significant(value: Any, digits: int = 6) -> str:
    """Format a number with a fixed count of significant digits."""
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return str(value).lower()
    return f"{float(value):.{digits}g}"


class ReportLoader:
    """Loads and renders Markdown summary templates using Jinja2."""

    def __init__(self, templates_dir: Path | None = None):
        """Initialize the report loader.

        Args:
            templates_dir: Directory containing report templates.
                        Defaults to the templates shipped with the package.
        """
        if templates_dir is None:
            templates_dir = Path(str(files("fracplap") / "templates"))

        self.templates_dir = templates_dir
        self.env = Environment(
            loader=FileSystemLoader(str(templates_dir)),
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
            autoescape=False,  # nosec B701 - Markdown output, not HTML  # noqa: S701
        )
        self.env.filters["sig"] = _significant

    def load_template(self, template_name: str) -> Template:
        """Load a Jinja2 template by name.

        Raises:
            FileNotFoundError: If template file doesn't exist
        """
        try:
            return self.env.get_template(template_name)
        except TemplateNotFound as e:
            raise FileNotFoundError(
                f"Template '{template_name}' not found in {self.templates_dir}"
            ) from e

    def render_report(self, template_name: str, **kwargs: Any) -> str:
        """Load and render a report template with the given variables."""
        template = self.load_template(template_name)
        return cast(str, template.render(**kwargs))  # type: ignore[redundant-cast,unused-ignore]


# Global instance for easy access
report_loader = ReportLoader()


def render_report(template_name: str, **kwargs: Any) -> str:
    return report_loader.render_report(template_name, **kwargs)
