#include <iostream>

int main() {
    std::cerr << "acceptance criteria not implemented yet" << std::endl;
    return 1;
}
