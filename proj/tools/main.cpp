#include <cstdio>

int main() {
    std::fprintf(stderr, "homform: not yet wired up\n");
    return 2;
}
