// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"
#include "volsre/kernels.hpp"

namespace volsre::kernels {
namespace {

bool host_has_avx2()
{
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& choose()
{
    const char* env = std::getenv("VOLSRE_KERNELS");
    if (env != nullptr && std::string_view(env) == "scalar")
        return scalar_table();
    if (const KernelTable* t = avx2_table())
        return *t;
    return scalar_table();
}

}  // namespace

const KernelTable* avx2_table()
{
    static const bool ok = host_has_avx2();
    return ok ? detail::avx2_table_if_built() : nullptr;
}

const KernelTable& active()
{
    static const KernelTable& table = choose();
    return table;
}

}  // namespace volsre::kernels
