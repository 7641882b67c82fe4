#include <cstdio>

int main() {
    std::puts("msdyn: CLI under construction");
    return 0;
}
