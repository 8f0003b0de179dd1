from collections import OrderedDict

from prettytable import PrettyTable


def dicts_to_pt(data, columns=None, align=None, numbered=True):
    """Convert a list of records (bias rows, fit clusters, verdict counts) to a PrettyTable.

    Parameters:
    - data (list): Records to show, one row each.
    - columns (list, optional): Column order. Defaults to the union of keys in first-seen order.
    - align (str, optional): The alignment of columns. Defaults to None.
    - numbered (bool, optional): Prepend a "#" column. Defaults to True.

    Returns:
    PrettyTable: A PrettyTable containing the records.
    """
    rows = [{k: format_value(v) for k, v in record.items()} for record in data]
    if columns is None:
        columns = list(OrderedDict.fromkeys(k for record in rows for k in record))
    columns = list(columns)
    if numbered:
        columns, rows = add_numbers_column(columns, rows)
    return generate_table(columns, data=rows, align=align)


def dict_to_pt(data, align=None):
    """Convert a single record (CDF stats, KS result, evaluation) to a key/value PrettyTable.

    Parameters:
    - data (dict): The record to show.
    - align (str, optional): The alignment of columns. Defaults to "l".

    Returns:
    PrettyTable: A PrettyTable with "key" and "value" columns.
    """
    list_of_dicts = [{"key": k, "value": v} for k, v in data.items()]
    return dicts_to_pt(list_of_dicts, ["key", "value"], align or "l", numbered=False)


def format_value(value):
    """Render floats with 6 significant digits, everything else as is."""
    if isinstance(value, float):
        return f"{value:.6g}"
    return "" if value is None else value


def add_numbers_column(columns, items):
    """Add a column with line numbers to the list of columns and items.

    Parameters:
    - columns (list): The list of column names.
    - items (list): The list of items (dictionaries) to be numbered.

    Returns:
    tuple: A tuple containing the modified columns and items.
    """
    columns.insert(0, "#")
    for line_number, item in enumerate(items, start=1):
        item["#"] = line_number
    return columns, items


def generate_table(cols, data, align=None):
    """Generate a PrettyTable from a list of columns and data; missing cells stay blank."""
    pt = PrettyTable(cols)

    for row_data in data:
        pt.add_row([row_data.get(column, "") for column in cols])

    pt.align = align if align else pt.align
    return pt
