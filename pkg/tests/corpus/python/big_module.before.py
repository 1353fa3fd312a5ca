"""Order helpers."""

TAX = 0.08


def subtotal(items):
    return sum(i.price * i.count for i in items)


def total(items):
    return subtotal(items) * (1 + TAX)


def receipt(items):
    lines = [f"{i.name}: {i.price}" for i in items]
    lines.append(f"total: {total(items)}")
    return "\n".join(lines)
