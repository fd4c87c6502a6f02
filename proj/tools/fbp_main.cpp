#include <cstdio>
int main() { std::puts("fbp"); return 0; }
