def handler(request):
    return request.body
