"""Order helpers."""

TAX = 0.093


def subtotal(items):
    return sum(i.price * i.count for i in items)


def discount(items, rate):
    return subtotal(items) * rate


def total(items, rate=0.0):
    return (subtotal(items) - discount(items, rate)) * (1 + TAX)


def receipt(items):
    lines = [f"{i.name}: {i.price}" for i in items]
    lines.append(f"total: {total(items)}")
    return "\n".join(lines)
