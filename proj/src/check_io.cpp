#include <adiapass/io.hpp>
